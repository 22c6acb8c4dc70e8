//! The end-to-end stages shared by the comparison harness and the CLI:
//! split and normalize, pick the subsample, estimate couplings, run the
//! quantum extractor, fit the surrogate, replay it.

use nalgebra::DMatrix;

use crate::dataset::{split, Dataset, NormMode, NormStats, Split, SplitSpec};
use crate::downstream::ClassifierKind;
use crate::error::{Error, Result};
use crate::hamiltonian::{
    build_topology, enumerate_subsets, estimate_coefficients, CouplingGraph, Schedule, TopologyKind,
};
use crate::qsim::{FeatureLayout, QuantumConfig, QuantumExtractor, ShotMode};
use crate::subsample::{select_subsample, Subsample, SubsampleSpec};
use crate::surrogate::{default_lambda_grid, CoverageFlag, CrossValidation, LiftSpec, SurrogateModel};

#[derive(Debug, Clone, PartialEq)]
pub enum LambdaChoice {
    Fixed(f64),
    CrossValidated { grid: Vec<f64>, folds: usize },
}

impl Default for LambdaChoice {
    fn default() -> Self {
        LambdaChoice::CrossValidated {
            grid: default_lambda_grid(),
            folds: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineSettings {
    pub norm_mode: NormMode,
    pub test_fraction: f64,
    /// `None` means one fifth of the full dataset, rounded up.
    pub subsample_size: Option<usize>,
    pub max_medoid_iters: usize,
    pub topology: TopologyKind,
    pub max_locality: usize,
    pub bins: usize,
    pub coupling_strength: f64,
    pub schedule: Schedule,
    pub cd_enabled: bool,
    pub shots: ShotMode,
    /// Seed for shot sampling; `None` reuses `seed`.
    pub shot_seed: Option<u64>,
    pub driver_strength: f64,
    pub lambda: LambdaChoice,
    pub lift: LiftSpec,
    pub classifier: ClassifierKind,
    pub seed: u64,
}

impl Default for PipelineSettings {
    fn default() -> Self {
        PipelineSettings {
            norm_mode: NormMode::MinMaxSymmetric,
            test_fraction: 0.2,
            subsample_size: None,
            max_medoid_iters: 100,
            topology: TopologyKind::Line,
            max_locality: 2,
            bins: 4,
            coupling_strength: 1.0,
            schedule: Schedule::default(),
            cd_enabled: true,
            shots: ShotMode::Exact,
            shot_seed: None,
            driver_strength: 1.0,
            lambda: LambdaChoice::default(),
            lift: LiftSpec::Identity,
            classifier: ClassifierKind::MultinomialLogistic,
            seed: 0,
        }
    }
}

impl PipelineSettings {
    pub fn quantum_config(&self, n: usize) -> QuantumConfig {
        QuantumConfig {
            n,
            schedule: self.schedule,
            cd_enabled: self.cd_enabled,
            shots: self.shots,
            seed: self.shot_seed.unwrap_or(self.seed),
            driver_strength: self.driver_strength,
        }
    }

    pub fn split_spec(&self) -> SplitSpec {
        SplitSpec {
            test_fraction: self.test_fraction,
            seed: self.seed,
        }
    }
}

/// Raw data split into train/test with every row normalized by statistics
/// fitted on the training rows.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub split: Split,
    pub norm: NormStats,
    pub normalized: Dataset,
}

pub fn prepare(raw: &Dataset, settings: &PipelineSettings) -> Result<Prepared> {
    let split = split(raw, &settings.split_spec())?;
    let norm = NormStats::fit(&split.train.samples, settings.norm_mode);
    let normalized = raw.normalize_with(&norm);
    Ok(Prepared {
        split,
        norm,
        normalized,
    })
}

impl Prepared {
    pub fn len(&self) -> usize {
        self.normalized.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normalized.is_empty()
    }

    pub fn subsample_size(&self, settings: &PipelineSettings) -> usize {
        settings
            .subsample_size
            .unwrap_or_else(|| SubsampleSpec::default_size(self.len()).min(self.split.train_idx.len()))
    }

    /// Subsample of the training rows; indices refer to the full dataset.
    pub fn subsample(&self, settings: &PipelineSettings) -> Result<Subsample> {
        let train = self.normalized.select(&self.split.train_idx);
        let spec = SubsampleSpec {
            size: self.subsample_size(settings),
            seed: settings.seed,
            max_medoid_iters: settings.max_medoid_iters,
        };
        let local = select_subsample(&train, &spec)?;
        let mut indices: Vec<usize> = local.indices.iter().map(|&i| self.split.train_idx[i]).collect();
        indices.sort_unstable();
        Ok(Subsample {
            indices,
            per_class_counts: local.per_class_counts,
        })
    }

    pub fn rows(&self, indices: &[usize]) -> Result<DMatrix<f64>> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.len()) {
            return Err(Error::InvalidArgument(format!(
                "row index {bad} out of range for {} rows",
                self.len()
            )));
        }
        Ok(self.normalized.samples.select_rows(indices.iter()))
    }
}

/// Topology over one qubit per input column, subsets up to the configured
/// locality, coefficients estimated on the subsample rows.
pub fn coupling_graph(
    subsample_rows: &DMatrix<f64>,
    settings: &PipelineSettings,
) -> Result<(CouplingGraph, Vec<String>)> {
    let n = subsample_rows.ncols();
    let top = build_topology(settings.topology, n)?;
    let subsets = enumerate_subsets(&top, settings.max_locality)?;
    let (graph, warnings) = estimate_coefficients(subsample_rows, &subsets, settings.max_locality, settings.bins)?;
    Ok((graph.with_strength(settings.coupling_strength), warnings))
}

pub fn extractor(graph: &CouplingGraph, settings: &PipelineSettings) -> Result<QuantumExtractor> {
    QuantumExtractor::new(graph.clone(), settings.quantum_config(graph.n))
}

/// Fit the surrogate on normalized subsample rows against their quantum
/// features, with lambda fixed or cross-validated.
pub fn fit_surrogate(
    inputs: &DMatrix<f64>,
    targets: &DMatrix<f64>,
    norm: &NormStats,
    graph: &CouplingGraph,
    settings: &PipelineSettings,
) -> Result<(SurrogateModel, Option<CrossValidation>)> {
    let layout = FeatureLayout::from_graph(graph);
    let (model, cv) = match &settings.lambda {
        LambdaChoice::Fixed(lambda) => (
            SurrogateModel::fit(inputs, targets, *lambda, &settings.lift, norm.clone(), layout)?,
            None,
        ),
        LambdaChoice::CrossValidated { grid, folds } => {
            let (m, cv) = SurrogateModel::fit_cv(inputs, targets, grid, *folds, &settings.lift, norm.clone(), layout)?;
            (m, Some(cv))
        }
    };
    Ok((model.with_coupling(graph.clone()), cv))
}

/// Surrogate features and coverage flags for every raw row.
pub fn replay(model: &SurrogateModel, raw: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<CoverageFlag>)> {
    if raw.ncols() != model.input_dim() {
        return Err(Error::Dimension(format!(
            "dataset has {} columns, model expects {}",
            raw.ncols(),
            model.input_dim()
        )));
    }
    let features = model.predict_batch(raw)?;
    let flags = raw
        .row_iter()
        .map(|r| model.coverage_flag(&r.iter().copied().collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    Ok((features, flags))
}

/// FNV-1a digest of the split, used to show that compared pipelines share it.
pub fn split_digest(split: &Split) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut feed = |v: u64| {
        for b in v.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    for &i in &split.train_idx {
        feed(i as u64);
    }
    feed(u64::MAX);
    for &i in &split.test_idx {
        feed(i as u64);
    }
    format!("{h:016x}")
}
