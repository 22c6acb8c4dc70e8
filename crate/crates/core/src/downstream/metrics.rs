use nalgebra::DMatrix;

use super::classifier::Classifier;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub classes: Vec<i64>,
    pub accuracy: f64,
    /// Binary: standard ROC AUC. Multiclass: macro one-vs-rest. NaN when a
    /// class needed for it is absent from the evaluation labels.
    pub auc: f64,
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    /// `confusion[true][predicted]`
    pub confusion: Vec<Vec<usize>>,
}

/// Area under the ROC curve via the rank statistic; tied scores share their
/// average rank.
pub fn roc_auc(scores: &[f64], positive: &[bool]) -> f64 {
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return f64::NAN;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut ranks = vec![0.0; scores.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // 1-based ranks i+1..=j+1 averaged
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    let rank_sum: f64 = ranks.iter().zip(positive).filter(|(_, &p)| p).map(|(r, _)| r).sum();
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    u / (n_pos * n_neg) as f64
}

/// Accuracy, AUC, per-class precision/recall and the confusion matrix.
pub fn evaluate(clf: &Classifier, features: &DMatrix<f64>, labels: &[i64]) -> Result<EvalReport> {
    if features.nrows() != labels.len() {
        return Err(Error::Dimension(format!(
            "{} feature rows for {} labels",
            features.nrows(),
            labels.len()
        )));
    }
    if features.ncols() != clf.feature_dim() {
        return Err(Error::Dimension(format!(
            "classifier expects {} features, got {}",
            clf.feature_dim(),
            features.ncols()
        )));
    }
    let c = clf.classes.len();
    let mut truth = Vec::with_capacity(labels.len());
    for y in labels {
        truth.push(clf.classes.binary_search(y).map_err(|_| Error::UnknownClass(*y))?);
    }
    let scores: Vec<Vec<f64>> = features
        .row_iter()
        .map(|r| clf.scores(&r.iter().copied().collect::<Vec<_>>()))
        .collect();
    let predicted: Vec<usize> = scores
        .iter()
        .map(|s| (0..c).fold(0, |b, k| if s[k] > s[b] { k } else { b }))
        .collect();

    let mut confusion = vec![vec![0usize; c]; c];
    for (&t, &p) in truth.iter().zip(&predicted) {
        confusion[t][p] += 1;
    }
    let total = labels.len();
    let correct: usize = (0..c).map(|k| confusion[k][k]).sum();
    let accuracy = if total == 0 {
        f64::NAN
    } else {
        correct as f64 / total as f64
    };
    let precision = (0..c)
        .map(|k| {
            let col: usize = (0..c).map(|t| confusion[t][k]).sum();
            if col == 0 {
                0.0
            } else {
                confusion[k][k] as f64 / col as f64
            }
        })
        .collect();
    let recall = (0..c)
        .map(|k| {
            let row: usize = confusion[k].iter().sum();
            if row == 0 {
                0.0
            } else {
                confusion[k][k] as f64 / row as f64
            }
        })
        .collect();

    let auc = if c == 2 {
        let s: Vec<f64> = scores.iter().map(|s| s[1] - s[0]).collect();
        let pos: Vec<bool> = truth.iter().map(|&t| t == 1).collect();
        roc_auc(&s, &pos)
    } else {
        let per: Vec<f64> = (0..c)
            .map(|k| {
                let s: Vec<f64> = scores.iter().map(|s| s[k]).collect();
                let pos: Vec<bool> = truth.iter().map(|&t| t == k).collect();
                roc_auc(&s, &pos)
            })
            .collect();
        per.iter().sum::<f64>() / c as f64
    };

    Ok(EvalReport {
        classes: clf.classes.clone(),
        accuracy,
        auc,
        precision,
        recall,
        confusion,
    })
}
