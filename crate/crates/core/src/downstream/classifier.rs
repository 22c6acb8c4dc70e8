use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClassifierKind {
    #[default]
    MultinomialLogistic,
    NearestCentroid,
}

impl ClassifierKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClassifierKind::MultinomialLogistic => "multinomial-logistic",
            ClassifierKind::NearestCentroid => "nearest-centroid",
        }
    }
}

impl std::str::FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "multinomial-logistic" | "logistic" => Ok(ClassifierKind::MultinomialLogistic),
            "nearest-centroid" => Ok(ClassifierKind::NearestCentroid),
            other => Err(Error::InvalidArgument(format!("unknown classifier '{other}'"))),
        }
    }
}

/// Full-batch gradient descent settings for the logistic model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticOptions {
    pub l2: f64,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub initial_step: f64,
}

impl Default for LogisticOptions {
    fn default() -> Self {
        LogisticOptions {
            l2: 1e-4,
            max_iters: 3000,
            grad_tol: 1e-5,
            initial_step: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClassifierModel {
    Logistic {
        /// `classes x features`
        weights: DMatrix<f64>,
        bias: DVector<f64>,
    },
    NearestCentroid {
        /// `classes x features`
        centroids: DMatrix<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classifier {
    pub classes: Vec<i64>,
    pub model: ClassifierModel,
    /// Training loss after every accepted step (logistic only).
    pub loss_history: Vec<f64>,
}

/// Mean softmax cross-entropy plus `l2 / 2 |W|^2`, and its gradient.
pub fn logistic_loss_grad(
    weights: &DMatrix<f64>,
    bias: &DVector<f64>,
    features: &DMatrix<f64>,
    targets: &[usize],
    l2: f64,
) -> (f64, DMatrix<f64>, DVector<f64>) {
    let n = features.nrows();
    let c = weights.nrows();
    let mut gw = DMatrix::zeros(c, features.ncols());
    let mut gb = DVector::zeros(c);
    let mut loss = 0.0;
    for i in 0..n {
        let x = features.row(i).transpose();
        let logits = weights * &x + bias;
        let max = logits.max();
        let exps = logits.map(|v| (v - max).exp());
        let z = exps.sum();
        loss += -(logits[targets[i]] - max - z.ln());
        for k in 0..c {
            let r = exps[k] / z - if k == targets[i] { 1.0 } else { 0.0 };
            gb[k] += r;
            for j in 0..x.len() {
                gw[(k, j)] += r * x[j];
            }
        }
    }
    let inv = 1.0 / n as f64;
    loss = loss * inv + 0.5 * l2 * weights.norm_squared();
    gw = gw * inv + weights * l2;
    gb *= inv;
    (loss, gw, gb)
}

fn class_targets(labels: &[i64], classes: &[i64]) -> Vec<usize> {
    labels
        .iter()
        .map(|y| classes.binary_search(y).expect("label drawn from classes"))
        .collect()
}

/// Train on rows of `features`. Deterministic: logistic weights start at
/// zero and the step schedule is fixed, so `seed` has no effect on the
/// result. It is kept so callers can treat both kinds uniformly.
pub fn train_classifier(
    features: &DMatrix<f64>,
    labels: &[i64],
    kind: ClassifierKind,
    _seed: u64,
) -> Result<Classifier> {
    train_classifier_with(features, labels, kind, &LogisticOptions::default())
}

pub fn train_classifier_with(
    features: &DMatrix<f64>,
    labels: &[i64],
    kind: ClassifierKind,
    opts: &LogisticOptions,
) -> Result<Classifier> {
    if features.nrows() != labels.len() {
        return Err(Error::Dimension(format!(
            "{} feature rows for {} labels",
            features.nrows(),
            labels.len()
        )));
    }
    if features.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("classifier features".into()));
    }
    let mut classes = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::SingleClass);
    }
    let targets = class_targets(labels, &classes);
    let c = classes.len();
    let d = features.ncols();

    match kind {
        ClassifierKind::NearestCentroid => {
            let mut centroids = DMatrix::zeros(c, d);
            let mut counts = vec![0usize; c];
            for (i, &t) in targets.iter().enumerate() {
                counts[t] += 1;
                for j in 0..d {
                    centroids[(t, j)] += features[(i, j)];
                }
            }
            for (k, &cnt) in counts.iter().enumerate() {
                for j in 0..d {
                    centroids[(k, j)] /= cnt as f64;
                }
            }
            Ok(Classifier {
                classes,
                model: ClassifierModel::NearestCentroid { centroids },
                loss_history: Vec::new(),
            })
        }
        ClassifierKind::MultinomialLogistic => {
            let mut w = DMatrix::zeros(c, d);
            let mut b = DVector::zeros(c);
            let mut step = opts.initial_step;
            let (mut loss, mut gw, mut gb) = logistic_loss_grad(&w, &b, features, &targets, opts.l2);
            let mut history = vec![loss];
            for _ in 0..opts.max_iters {
                let gnorm = (gw.norm_squared() + gb.norm_squared()).sqrt();
                if gnorm <= opts.grad_tol {
                    break;
                }
                // Halve the step until the loss does not increase.
                let mut accepted = false;
                for _ in 0..60 {
                    let tw = &w - &gw * step;
                    let tb = &b - &gb * step;
                    let (tl, tgw, tgb) = logistic_loss_grad(&tw, &tb, features, &targets, opts.l2);
                    if tl <= loss {
                        w = tw;
                        b = tb;
                        loss = tl;
                        gw = tgw;
                        gb = tgb;
                        accepted = true;
                        break;
                    }
                    step *= 0.5;
                }
                if !accepted {
                    break;
                }
                history.push(loss);
            }
            Ok(Classifier {
                classes,
                model: ClassifierModel::Logistic { weights: w, bias: b },
                loss_history: history,
            })
        }
    }
}

impl Classifier {
    pub fn kind(&self) -> ClassifierKind {
        match self.model {
            ClassifierModel::Logistic { .. } => ClassifierKind::MultinomialLogistic,
            ClassifierModel::NearestCentroid { .. } => ClassifierKind::NearestCentroid,
        }
    }

    pub fn feature_dim(&self) -> usize {
        match &self.model {
            ClassifierModel::Logistic { weights, .. } => weights.ncols(),
            ClassifierModel::NearestCentroid { centroids } => centroids.ncols(),
        }
    }

    /// Per-class score, higher meaning more likely: softmax probabilities for
    /// the logistic model, negative squared distance for nearest centroid.
    pub fn scores(&self, x: &[f64]) -> Vec<f64> {
        match &self.model {
            ClassifierModel::Logistic { weights, bias } => {
                let logits: Vec<f64> = (0..weights.nrows())
                    .map(|k| bias[k] + weights.row(k).iter().zip(x).map(|(w, v)| w * v).sum::<f64>())
                    .collect();
                let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
                let z: f64 = exps.iter().sum();
                exps.iter().map(|e| e / z).collect()
            }
            ClassifierModel::NearestCentroid { centroids } => (0..centroids.nrows())
                .map(|k| {
                    -centroids
                        .row(k)
                        .iter()
                        .zip(x)
                        .map(|(c, v)| (c - v).powi(2))
                        .sum::<f64>()
                })
                .collect(),
        }
    }

    pub fn predict(&self, x: &[f64]) -> i64 {
        let s = self.scores(x);
        let best = (0..s.len()).fold(0, |b, k| if s[k] > s[b] { k } else { b });
        self.classes[best]
    }

    /// Plain-text serialization (one `key value...` line per field).
    pub fn to_text(&self) -> String {
        let fmt_row = |r: Vec<f64>| r.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(" ");
        let classes: Vec<String> = self.classes.iter().map(|c| c.to_string()).collect();
        let mut s = format!("kind {}\nclasses {}\n", self.kind().as_str(), classes.join(" "));
        let (m, extra) = match &self.model {
            ClassifierModel::Logistic { weights, bias } => (weights, Some(bias)),
            ClassifierModel::NearestCentroid { centroids } => (centroids, None),
        };
        s.push_str(&format!("features {}\n", m.ncols()));
        for row in m.row_iter() {
            s.push_str(&format!("row {}\n", fmt_row(row.iter().copied().collect())));
        }
        if let Some(b) = extra {
            s.push_str(&format!("bias {}\n", fmt_row(b.iter().copied().collect())));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::InvalidArgument(format!("classifier file: {m}"));
        let mut kind = None;
        let mut classes = Vec::new();
        let mut dim = 0;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut bias = None;
        let floats = |v: &str| -> Result<Vec<f64>> {
            v.split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| bad("bad number")))
                .collect()
        };
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
            match key {
                "kind" => kind = Some(rest.trim().parse::<ClassifierKind>()?),
                "classes" => {
                    classes = rest
                        .split_whitespace()
                        .map(|t| t.parse::<i64>().map_err(|_| bad("bad class id")))
                        .collect::<Result<_>>()?
                }
                "features" => dim = rest.trim().parse().map_err(|_| bad("bad feature count"))?,
                "row" => rows.push(floats(rest)?),
                "bias" => bias = Some(floats(rest)?),
                _ => return Err(bad(&format!("unknown key '{key}'"))),
            }
        }
        let kind = kind.ok_or_else(|| bad("missing kind"))?;
        if rows.len() != classes.len() || rows.iter().any(|r| r.len() != dim) {
            return Err(bad("row count or width does not match classes/features"));
        }
        let m = DMatrix::from_fn(rows.len(), dim, |i, j| rows[i][j]);
        let model = match kind {
            ClassifierKind::MultinomialLogistic => {
                let b = bias.ok_or_else(|| bad("missing bias"))?;
                if b.len() != classes.len() {
                    return Err(bad("bias length does not match classes"));
                }
                ClassifierModel::Logistic {
                    weights: m,
                    bias: DVector::from_vec(b),
                }
            }
            ClassifierKind::NearestCentroid => ClassifierModel::NearestCentroid { centroids: m },
        };
        Ok(Classifier {
            classes,
            model,
            loss_history: Vec::new(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blobs() -> (DMatrix<f64>, Vec<i64>) {
        let pts = [
            (-1.0, -0.8),
            (-0.9, -1.1),
            (-1.2, -0.9),
            (-0.8, -1.0),
            (1.0, 0.9),
            (1.1, 1.2),
            (0.9, 1.0),
            (1.2, 0.8),
        ];
        let x = DMatrix::from_fn(8, 2, |i, j| if j == 0 { pts[i].0 } else { pts[i].1 });
        (x, vec![0, 0, 0, 0, 1, 1, 1, 1])
    }

    #[test]
    fn separable_blobs_fit_perfectly() {
        let (x, y) = blobs();
        let clf = train_classifier(&x, &y, ClassifierKind::MultinomialLogistic, 0).unwrap();
        for i in 0..8 {
            assert_eq!(clf.predict(&[x[(i, 0)], x[(i, 1)]]), y[i]);
        }
        assert!(clf.loss_history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn centroid_boundary_is_bisector() {
        // Symmetric blobs centred on (-1, 0) and (1, 0): the boundary is x = 0.
        let x = DMatrix::from_row_slice(4, 2, &[-1.0, 0.5, -1.0, -0.5, 1.0, 0.5, 1.0, -0.5]);
        let y = vec![3, 3, 7, 7];
        let clf = train_classifier(&x, &y, ClassifierKind::NearestCentroid, 0).unwrap();
        for probe_y in [-3.0, 0.0, 2.0] {
            assert_eq!(clf.predict(&[-0.01, probe_y]), 3);
            assert_eq!(clf.predict(&[0.01, probe_y]), 7);
            let s = clf.scores(&[0.0, probe_y]);
            assert!((s[0] - s[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let x = DMatrix::from_fn(7, 3, |i, j| ((i * 5 + j * 7) % 9) as f64 / 4.0 - 1.0);
        let t = vec![0, 1, 2, 1, 0, 2, 2];
        let w = DMatrix::from_fn(3, 3, |i, j| 0.1 * (i as f64) - 0.2 * (j as f64) + 0.05);
        let b = DVector::from_vec(vec![0.1, -0.3, 0.2]);
        let l2 = 0.01;
        let (_, gw, gb) = logistic_loss_grad(&w, &b, &x, &t, l2);
        let h = 1e-6;
        let mut max_diff: f64 = 0.0;
        for k in 0..3 {
            for j in 0..3 {
                let mut wp = w.clone();
                wp[(k, j)] += h;
                let mut wm = w.clone();
                wm[(k, j)] -= h;
                let fd =
                    (logistic_loss_grad(&wp, &b, &x, &t, l2).0 - logistic_loss_grad(&wm, &b, &x, &t, l2).0) / (2.0 * h);
                max_diff = max_diff.max((fd - gw[(k, j)]).abs());
            }
            let mut bp = b.clone();
            bp[k] += h;
            let mut bm = b.clone();
            bm[k] -= h;
            let fd =
                (logistic_loss_grad(&w, &bp, &x, &t, l2).0 - logistic_loss_grad(&w, &bm, &x, &t, l2).0) / (2.0 * h);
            max_diff = max_diff.max((fd - gb[k]).abs());
        }
        assert!(max_diff <= 1e-6, "{max_diff}");
    }

    #[test]
    fn single_class_rejected() {
        let x = DMatrix::from_row_slice(2, 1, &[0.0, 1.0]);
        assert!(matches!(
            train_classifier(&x, &[1, 1], ClassifierKind::NearestCentroid, 0),
            Err(Error::SingleClass)
        ));
    }

    #[test]
    fn text_round_trip() {
        let (x, y) = blobs();
        for kind in [ClassifierKind::MultinomialLogistic, ClassifierKind::NearestCentroid] {
            let mut clf = train_classifier(&x, &y, kind, 0).unwrap();
            clf.loss_history.clear();
            assert_eq!(Classifier::from_text(&clf.to_text()).unwrap(), clf);
        }
    }
}
