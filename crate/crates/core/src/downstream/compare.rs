use nalgebra::DMatrix;

use super::classifier::train_classifier;
use super::metrics::evaluate;
use crate::dataset::Dataset;
use crate::error::Result;
use crate::pipeline::{coupling_graph, extractor, fit_surrogate, prepare, split_digest, PipelineSettings};

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub approach: String,
    pub accuracy: f64,
    pub auc: f64,
    /// Number of quantum evolutions the approach needed.
    pub quantum_evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub rows: Vec<ReportRow>,
    /// Digest of the train/test split shared by every row.
    pub split_digest: String,
    pub train_size: usize,
    pub test_size: usize,
    pub subsample_size: usize,
    pub lambda: f64,
}

impl ComparisonReport {
    pub fn row(&self, approach: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.approach == approach)
    }

    /// Fixed-width human-readable table.
    pub fn to_table(&self) -> String {
        let mut s = format!("{:<14} {:>9} {:>7} {:>10}\n", "approach", "accuracy", "auc", "q-evals");
        for r in &self.rows {
            s.push_str(&format!(
                "{:<14} {:>9.4} {:>7.4} {:>10}\n",
                r.approach, r.accuracy, r.auc, r.quantum_evaluations
            ));
        }
        s
    }
}

/// Train and evaluate, on one shared split: (a) raw normalized inputs,
/// (b) quantum features for every row, (c) surrogate features with quantum
/// evolution only on the subsample.
pub fn compare_pipelines(raw: &Dataset, settings: &PipelineSettings) -> Result<ComparisonReport> {
    let prep = prepare(raw, settings)?;
    let train_idx = &prep.split.train_idx;
    let test_idx = &prep.split.test_idx;
    let y_train: Vec<i64> = train_idx.iter().map(|&i| raw.labels[i]).collect();
    let y_test: Vec<i64> = test_idx.iter().map(|&i| raw.labels[i]).collect();

    let sub = prep.subsample(settings)?;
    let sub_rows = prep.rows(&sub.indices)?;
    let (graph, _) = coupling_graph(&sub_rows, settings)?;

    let run = |features: &DMatrix<f64>, approach: &str, evals: usize| -> Result<ReportRow> {
        let tr = features.select_rows(train_idx.iter());
        let te = features.select_rows(test_idx.iter());
        let clf = train_classifier(&tr, &y_train, settings.classifier, settings.seed)?;
        let rep = evaluate(&clf, &te, &y_test)?;
        Ok(ReportRow {
            approach: approach.to_string(),
            accuracy: rep.accuracy,
            auc: rep.auc,
            quantum_evaluations: evals,
        })
    };

    let classical = run(&prep.normalized.samples, "classical", 0)?;

    let full = extractor(&graph, settings)?;
    let full_features = full.extract_batch(&prep.normalized.samples).into_matrix()?;
    let full_row = run(&full_features, "full-quantum", full.evolutions())?;

    let partial = extractor(&graph, settings)?;
    let targets = partial.extract_batch(&sub_rows).into_matrix()?;
    let (model, _) = fit_surrogate(&sub_rows, &targets, &prep.norm, &graph, settings)?;
    let surrogate_features = model.predict_batch(&raw.samples)?;
    let surrogate_row = run(&surrogate_features, "surrogate", partial.evolutions())?;

    Ok(ComparisonReport {
        rows: vec![classical, full_row, surrogate_row],
        split_digest: split_digest(&prep.split),
        train_size: train_idx.len(),
        test_size: test_idx.len(),
        subsample_size: sub.len(),
        lambda: model.lambda,
    })
}
