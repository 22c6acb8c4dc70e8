//! One function per subcommand. Each reads its inputs from disk, writes its
//! artifacts under the run directory and refreshes the manifest, so
//! `run_all` is literally the composition of the others.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use qfe_core::dataset::{load_dataset, Dataset, LabelColumn};
use qfe_core::downstream::{compare_pipelines, evaluate, train_classifier, Classifier};
use qfe_core::hamiltonian::CouplingGraph;
use qfe_core::pipeline::{self, prepare, split_digest, PipelineSettings, Prepared};
use qfe_core::qsim::{features_to_csv, FeatureLayout, QUBIT_CAP};
use qfe_core::subsample::Subsample;
use qfe_core::surrogate::{load_model, save_model, Coverage};
use serde::Serialize;

use crate::artifacts::{self, read, write, write_json};
use crate::config::LoadedConfig;

/// Loaded configuration, dataset and prepared split shared by every stage.
pub struct Run {
    pub loaded: LoadedConfig,
    pub settings: PipelineSettings,
    pub out: PathBuf,
    pub raw: Dataset,
    pub prep: Prepared,
}

impl Run {
    pub fn open(config_path: &Path, out: Option<PathBuf>, seed: Option<u64>) -> Result<Self> {
        let mut loaded = LoadedConfig::load(config_path)?;
        if let Some(seed) = seed {
            loaded.config.seed = seed;
        }
        loaded.validate_paths()?;
        let settings = loaded.config.settings()?;
        let out = out.unwrap_or_else(|| loaded.output_dir());
        std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
        let label = LabelColumn::Name(loaded.config.dataset.label_column.clone());
        let raw = load_dataset(loaded.dataset_path(), &label)?;
        let prep = prepare(&raw, &settings)?;
        for w in &prep.split.warnings {
            eprintln!("warning: {w}");
        }
        Ok(Run {
            loaded,
            settings,
            out,
            raw,
            prep,
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn finish(&self) -> Result<()> {
        artifacts::update_manifest(&self.loaded, &self.out)
    }

    fn read_indices(&self, path: Option<&Path>) -> Result<Vec<usize>> {
        let p = path.map_or_else(|| self.path(artifacts::SUBSAMPLE_IDX), Path::to_path_buf);
        Ok(Subsample::parse_index_file(&read(&p)?)?)
    }
}

/// Attach the stage name to any error so the first failing stage is obvious.
pub fn stage<T>(name: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    f().with_context(|| format!("stage `{name}` failed"))
}

#[derive(Serialize)]
struct SubsampleSummary {
    size: usize,
    per_class_counts: BTreeMap<String, usize>,
    train_size: usize,
    test_size: usize,
    split_digest: String,
    /// In-coverage radius of the raw (identity-lifted) subsample inputs.
    coverage_radius_preview: f64,
}

pub fn subsample(run: &Run) -> Result<()> {
    let sub = run.prep.subsample(&run.settings)?;
    write(&run.path(artifacts::SUBSAMPLE_IDX), &sub.to_index_file())?;
    let coverage = Coverage::from_refs(run.prep.rows(&sub.indices)?);
    let summary = SubsampleSummary {
        size: sub.len(),
        per_class_counts: sub.per_class_counts.iter().map(|(c, n)| (c.to_string(), *n)).collect(),
        train_size: run.prep.split.train_idx.len(),
        test_size: run.prep.split.test_idx.len(),
        split_digest: split_digest(&run.prep.split),
        coverage_radius_preview: coverage.radius,
    };
    write_json(&run.path(artifacts::SUBSAMPLE_SUMMARY), &summary)?;
    println!(
        "subsample: {} of {} training rows, per class {:?}, coverage radius {:.4}",
        summary.size, summary.train_size, summary.per_class_counts, summary.coverage_radius_preview
    );
    run.finish()
}

pub fn extract(run: &Run, indices: Option<&Path>) -> Result<()> {
    let idx = run.read_indices(indices)?;
    let rows = run.prep.rows(&idx)?;
    let n = rows.ncols();
    if n > QUBIT_CAP {
        bail!(
            "{n} input columns need {n} qubits, above the simulator cap of {QUBIT_CAP}; \
             reduce the number of input columns (e.g. by feature selection) to at most {QUBIT_CAP}"
        );
    }
    let (graph, warnings) = pipeline::coupling_graph(&rows, &run.settings)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    write(&run.path(artifacts::COUPLING), &graph.to_text())?;
    let ex = pipeline::extractor(&graph, &run.settings)?;
    let started = Instant::now();
    let features = ex.extract_batch(&rows).into_vectors()?;
    write(&run.path(artifacts::FEATURES), &features_to_csv(ex.layout(), &features))?;
    println!(
        "extract: {} rows x {} features from {} evolutions in {:.2?}",
        features.len(),
        ex.layout().len(),
        ex.evolutions(),
        started.elapsed()
    );
    run.finish()
}

#[derive(Serialize)]
struct CvSummary {
    grid: Vec<f64>,
    mean_mse: Vec<f64>,
    std_err: Vec<f64>,
}

#[derive(Serialize)]
struct SurrogateSummary {
    lambda: f64,
    training_mse: f64,
    objective: f64,
    lift: &'static str,
    lifted_dim: usize,
    output_dim: usize,
    coverage_radius: f64,
    cross_validation: Option<CvSummary>,
}

pub fn train_surrogate(run: &Run, features: Option<&Path>, indices: Option<&Path>) -> Result<()> {
    let idx = run.read_indices(indices)?;
    let fpath = features.map_or_else(|| run.path(artifacts::FEATURES), Path::to_path_buf);
    let (layout, targets) = artifacts::read_feature_table(&read(&fpath)?)?;
    if targets.nrows() != idx.len() {
        bail!(
            "{} has {} rows but the index file lists {} rows",
            fpath.display(),
            targets.nrows(),
            idx.len()
        );
    }
    let graph = CouplingGraph::from_text(&read(&run.path(artifacts::COUPLING))?)?;
    if FeatureLayout::from_graph(&graph) != layout {
        bail!(
            "feature columns do not match the coupling graph in {}",
            artifacts::COUPLING
        );
    }
    let inputs = run.prep.rows(&idx)?;
    let (model, cv) = pipeline::fit_surrogate(&inputs, &targets, &run.prep.norm, &graph, &run.settings)?;
    save_model(&model, run.path(artifacts::MODEL))?;
    let summary = SurrogateSummary {
        lambda: model.lambda,
        training_mse: model.training_mse(&inputs, &targets),
        objective: model.objective(&inputs, &targets),
        lift: model.lift.kind_name(),
        lifted_dim: model.lift.output_dim(),
        output_dim: model.output_dim(),
        coverage_radius: model.coverage.radius,
        cross_validation: cv.map(|cv| CvSummary {
            grid: cv.grid,
            mean_mse: cv.mean_mse,
            std_err: cv.std_err,
        }),
    };
    write_json(&run.path(artifacts::SURROGATE_SUMMARY), &summary)?;
    println!(
        "train-surrogate: lambda {:e}, training MSE {:.6e}, {} lift ({} -> {} features)",
        summary.lambda, summary.training_mse, summary.lift, summary.lifted_dim, summary.output_dim
    );
    run.finish()
}

pub fn replay(run: &Run, model: Option<&Path>) -> Result<()> {
    let mpath = model.map_or_else(|| run.path(artifacts::MODEL), Path::to_path_buf);
    let model = load_model(&mpath)?;
    let started = Instant::now();
    let (features, flags) = pipeline::replay(&model, &run.raw.samples)?;
    let elapsed = started.elapsed();
    write(
        &run.path(artifacts::REPLAY),
        &artifacts::replay_to_csv(&model.layout, &features, &flags),
    )?;
    let outside = flags.iter().filter(|f| !f.in_coverage).count();
    println!(
        "replay: {} rows in {:.2?} ({:.1} us/sample), {} out of coverage",
        flags.len(),
        elapsed,
        elapsed.as_secs_f64() * 1e6 / flags.len().max(1) as f64,
        outside
    );
    run.finish()
}

fn read_features(run: &Run, features: Option<&Path>) -> Result<nalgebra::DMatrix<f64>> {
    let fpath = features.map_or_else(|| run.path(artifacts::REPLAY), Path::to_path_buf);
    let (_, m) = artifacts::read_feature_table(&read(&fpath)?)?;
    if m.nrows() != run.raw.len() {
        bail!(
            "{} has {} rows, the dataset {}",
            fpath.display(),
            m.nrows(),
            run.raw.len()
        );
    }
    Ok(m)
}

pub fn train(run: &Run, features: Option<&Path>) -> Result<()> {
    let m = read_features(run, features)?;
    let idx = &run.prep.split.train_idx;
    let x = m.select_rows(idx.iter());
    let y: Vec<i64> = idx.iter().map(|&i| run.raw.labels[i]).collect();
    let clf = train_classifier(&x, &y, run.settings.classifier, run.settings.seed)?;
    write(&run.path(artifacts::CLASSIFIER), &clf.to_text())?;
    println!(
        "train: {} classifier on {} rows x {} features",
        clf.kind().as_str(),
        x.nrows(),
        x.ncols()
    );
    run.finish()
}

#[derive(Serialize)]
struct EvalRecord {
    approach: &'static str,
    accuracy: f64,
    auc: f64,
    test_size: usize,
    classes: Vec<i64>,
    precision: Vec<f64>,
    recall: Vec<f64>,
    confusion: Vec<Vec<usize>>,
}

pub fn evaluate_cmd(run: &Run, classifier: Option<&Path>, features: Option<&Path>) -> Result<()> {
    let cpath = classifier.map_or_else(|| run.path(artifacts::CLASSIFIER), Path::to_path_buf);
    let clf = Classifier::from_text(&read(&cpath)?)?;
    let m = read_features(run, features)?;
    let idx = &run.prep.split.test_idx;
    let x = m.select_rows(idx.iter());
    let y: Vec<i64> = idx.iter().map(|&i| run.raw.labels[i]).collect();
    let rep = evaluate(&clf, &x, &y)?;
    let record = EvalRecord {
        approach: "surrogate",
        accuracy: rep.accuracy,
        auc: rep.auc,
        test_size: y.len(),
        classes: rep.classes.clone(),
        precision: rep.precision.clone(),
        recall: rep.recall.clone(),
        confusion: rep.confusion.clone(),
    };
    write_json(&run.path(artifacts::EVAL_JSON), &record)?;
    let mut txt = format!(
        "approach  surrogate\naccuracy  {:.4}\nauc       {:.4}\ntest rows {}\n\nconfusion (rows = true class)\n",
        rep.accuracy,
        rep.auc,
        y.len()
    );
    for (c, row) in rep.classes.iter().zip(&rep.confusion) {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:>6}")).collect();
        txt.push_str(&format!("{c:>6} {}\n", cells.join("")));
    }
    write(&run.path(artifacts::EVAL_TXT), &txt)?;
    print!("evaluate:\n{txt}");
    run.finish()
}

#[derive(Serialize)]
struct ReportRecord {
    approach: String,
    accuracy: f64,
    auc: f64,
    quantum_evaluations: usize,
}

#[derive(Serialize)]
struct ComparisonRecord {
    split_digest: String,
    train_size: usize,
    test_size: usize,
    subsample_size: usize,
    lambda: f64,
    rows: Vec<ReportRecord>,
}

pub fn compare(run: &Run) -> Result<()> {
    let report = compare_pipelines(&run.raw, &run.settings)?;
    let record = ComparisonRecord {
        split_digest: report.split_digest.clone(),
        train_size: report.train_size,
        test_size: report.test_size,
        subsample_size: report.subsample_size,
        lambda: report.lambda,
        rows: report
            .rows
            .iter()
            .map(|r| ReportRecord {
                approach: r.approach.clone(),
                accuracy: r.accuracy,
                auc: r.auc,
                quantum_evaluations: r.quantum_evaluations,
            })
            .collect(),
    };
    write_json(&run.path(artifacts::REPORT_JSON), &record)?;
    let txt = format!(
        "train {} / test {} rows, subsample {}, lambda {:e}, split {}\n\n{}",
        report.train_size,
        report.test_size,
        report.subsample_size,
        report.lambda,
        report.split_digest,
        report.to_table()
    );
    write(&run.path(artifacts::REPORT_TXT), &txt)?;
    print!("compare:\n{txt}");
    run.finish()
}

/// Every stage in order; aborts at the first failure, naming it.
pub fn run_all(run: &Run) -> Result<()> {
    stage("subsample", || subsample(run))?;
    stage("extract", || extract(run, None))?;
    stage("train-surrogate", || train_surrogate(run, None, None))?;
    stage("replay", || replay(run, None))?;
    stage("train", || train(run, None))?;
    stage("evaluate", || evaluate_cmd(run, None, None))?;
    stage("compare", || compare(run))?;
    println!("run-all: artifacts in {}", run.out.display());
    Ok(())
}
