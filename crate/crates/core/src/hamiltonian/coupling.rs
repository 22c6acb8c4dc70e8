//! Interaction coefficients from histogram estimates of mutual information
//! (pairs) and total correlation (larger subsets).

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Ordered k-body interaction subsets with a coefficient in `[0, 1]` each.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingGraph {
    pub n: usize,
    pub max_locality: usize,
    pub subsets: Vec<Vec<usize>>,
    pub coeffs: Vec<f64>,
    /// Global multiplier applied to every coupling term of the Hamiltonian.
    pub strength: f64,
}

impl CouplingGraph {
    pub fn new(n: usize, max_locality: usize, subsets: Vec<Vec<usize>>, coeffs: Vec<f64>) -> Result<Self> {
        if subsets.len() != coeffs.len() {
            return Err(Error::Dimension(format!(
                "{} subsets but {} coefficients",
                subsets.len(),
                coeffs.len()
            )));
        }
        for s in &subsets {
            if s.len() < 2 || s.len() > max_locality || s.iter().any(|&q| q >= n) {
                return Err(Error::InvalidArgument(format!("invalid subset {s:?}")));
            }
            if s.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidArgument(format!("subset {s:?} is not strictly sorted")));
            }
        }
        if coeffs.iter().any(|c| !(0.0..=1.0).contains(c)) {
            return Err(Error::InvalidArgument("coefficients must lie in [0, 1]".into()));
        }
        Ok(CouplingGraph {
            n,
            max_locality,
            subsets,
            coeffs,
            strength: 1.0,
        })
    }

    /// Graph with the given subsets and every coefficient zero.
    pub fn uncoupled(n: usize, max_locality: usize, subsets: Vec<Vec<usize>>) -> Result<Self> {
        let c = vec![0.0; subsets.len()];
        CouplingGraph::new(n, max_locality, subsets, c)
    }

    pub fn with_strength(mut self, strength: f64) -> Self {
        self.strength = strength;
        self
    }

    /// Text block: one subset per line, space separated qubit ids followed by
    /// the coefficient in fixed scientific notation.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "n {}\nmax_locality {}\nstrength {:.17e}\ncount {}\n",
            self.n,
            self.max_locality,
            self.strength,
            self.subsets.len()
        );
        for (set, c) in self.subsets.iter().zip(&self.coeffs) {
            let ids: Vec<String> = set.iter().map(|q| q.to_string()).collect();
            s.push_str(&format!("{} {:.17e}\n", ids.join(" "), c));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |m: String| Error::Format {
            section: "coupling".into(),
            message: m,
        };
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let mut header = |key: &str| -> Result<String> {
            let line = lines.next().ok_or_else(|| bad(format!("missing '{key}'")))?;
            line.strip_prefix(key)
                .map(|v| v.trim().to_string())
                .ok_or_else(|| bad(format!("expected '{key}', found '{line}'")))
        };
        let num = |v: String| v.parse::<usize>().map_err(|_| bad(format!("bad integer '{v}'")));
        let n = num(header("n")?)?;
        let max_locality = num(header("max_locality")?)?;
        let strength_s = header("strength")?;
        let strength: f64 = strength_s
            .parse()
            .map_err(|_| bad(format!("bad strength '{strength_s}'")))?;
        let count = num(header("count")?)?;
        let mut subsets = Vec::with_capacity(count);
        let mut coeffs = Vec::with_capacity(count);
        for line in lines {
            let mut parts: Vec<&str> = line.split_whitespace().collect();
            let c = parts
                .pop()
                .and_then(|p| p.parse::<f64>().ok())
                .ok_or_else(|| bad(format!("bad subset line '{line}'")))?;
            let set = parts
                .iter()
                .map(|p| p.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad(format!("bad subset line '{line}'")))?;
            subsets.push(set);
            coeffs.push(c);
        }
        if subsets.len() != count {
            return Err(bad(format!("expected {count} subsets, found {}", subsets.len())));
        }
        Ok(CouplingGraph::new(n, max_locality, subsets, coeffs)?.with_strength(strength))
    }
}

/// Quantile bin ids for one column. Equal values always share a bin.
pub fn quantile_bins(values: &[f64], bins: usize) -> Vec<usize> {
    let n = values.len();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let thresholds: Vec<f64> = (1..bins).map(|j| sorted[(j * n) / bins]).collect();
    values
        .iter()
        .map(|v| thresholds.iter().filter(|&&t| *v >= t).count())
        .collect()
}

fn entropy<K: std::hash::Hash + Eq>(keys: impl Iterator<Item = K>, n: usize) -> f64 {
    let mut counts: HashMap<K, usize> = HashMap::new();
    for k in keys {
        *counts.entry(k).or_default() += 1;
    }
    let n = n as f64;
    // Sum in a fixed order so results do not depend on hash iteration order.
    let mut c: Vec<usize> = counts.into_values().collect();
    c.sort_unstable();
    c.into_iter()
        .map(|k| {
            let p = k as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Normalized dependence of the binned columns in `cols`.
///
/// Pairs: `I(X;Y) / max(H(X), H(Y))`. Larger sets: total correlation
/// `sum H(X_i) - H(X_S)` divided by its largest attainable value given the
/// marginals, `sum H(X_i) - max H(X_i)`. Both lie in `[0, 1]` and equal 1 for
/// identical columns. A zero denominator yields 0.
pub fn normalized_dependence(binned: &[Vec<usize>], cols: &[usize]) -> f64 {
    let n = binned[cols[0]].len();
    let marginals: Vec<f64> = cols.iter().map(|&c| entropy(binned[c].iter().copied(), n)).collect();
    let joint = entropy(
        (0..n).map(|i| cols.iter().map(|&c| binned[c][i]).collect::<Vec<_>>()),
        n,
    );
    let sum: f64 = marginals.iter().sum();
    let max = marginals.iter().copied().fold(0.0, f64::max);
    let tc = (sum - joint).max(0.0);
    let denom = if cols.len() == 2 { max } else { sum - max };
    if denom <= 1e-15 {
        0.0
    } else {
        (tc / denom).clamp(0.0, 1.0)
    }
}

/// Coefficients for every subset, estimated from the rows of `samples`.
///
/// Returns the graph together with any warnings (e.g. bin count reduced
/// because there are too few rows).
pub fn estimate_coefficients(
    samples: &DMatrix<f64>,
    subsets: &[Vec<usize>],
    max_locality: usize,
    bins: usize,
) -> Result<(CouplingGraph, Vec<String>)> {
    let rows = samples.nrows();
    let n = samples.ncols();
    if rows < 2 {
        return Err(Error::InvalidArgument(format!(
            "coefficient estimation needs at least 2 rows, got {rows}"
        )));
    }
    let mut warnings = Vec::new();
    let mut bins = bins.max(2);
    if rows < bins {
        warnings.push(format!("only {rows} rows for {bins} bins; using {} bins", rows.max(2)));
        bins = rows.max(2);
    }
    let binned: Vec<Vec<usize>> = samples
        .column_iter()
        .map(|c| quantile_bins(c.as_slice(), bins))
        .collect();
    let coeffs = subsets.iter().map(|s| normalized_dependence(&binned, s)).collect();
    let graph = CouplingGraph::new(n, max_locality, subsets.to_vec(), coeffs)?;
    Ok((graph, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn matrix(cols: &[Vec<f64>]) -> DMatrix<f64> {
        DMatrix::from_fn(cols[0].len(), cols.len(), |i, j| cols[j][i])
    }

    #[test]
    fn independent_columns_near_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a: Vec<f64> = (0..200).map(|_| rng.random::<f64>()).collect();
        let b: Vec<f64> = (0..200).map(|_| rng.random::<f64>()).collect();
        let (g, _) = estimate_coefficients(&matrix(&[a, b]), &[vec![0, 1]], 2, 4).unwrap();
        assert!(g.coeffs[0] <= 0.1, "{}", g.coeffs[0]);
    }

    #[test]
    fn duplicated_column_is_one() {
        let a: Vec<f64> = (0..40).map(|i| ((i * 7919) % 97) as f64).collect();
        let (g, _) = estimate_coefficients(&matrix(&[a.clone(), a]), &[vec![0, 1]], 2, 4).unwrap();
        assert!((g.coeffs[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identical_triple_total_correlation_is_one() {
        let a: Vec<f64> = (0..32).map(|i| (i as f64).sin()).collect();
        let (g, _) = estimate_coefficients(&matrix(&[a.clone(), a.clone(), a]), &[vec![0, 1, 2]], 3, 4).unwrap();
        assert!((g.coeffs[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hand_computed_pair() {
        // x bins: 0 0 1 1, y bins: 0 1 1 1 (2 bins each).
        // H(X) = ln 2, H(Y) = -(1/4 ln 1/4 + 3/4 ln 3/4), H(X,Y): {00,01,11,11}
        let x = vec![0.0, 0.0, 1.0, 1.0];
        let y = vec![0.0, 1.0, 1.0, 1.0];
        let hx = 2f64.ln();
        let hy = -(0.25 * 0.25f64.ln() + 0.75 * 0.75f64.ln());
        let hxy = -(2.0 * 0.25 * 0.25f64.ln() + 0.5 * 0.5f64.ln());
        let expected = (hx + hy - hxy) / hx.max(hy);
        let (g, _) = estimate_coefficients(&matrix(&[x, y]), &[vec![0, 1]], 2, 2).unwrap();
        assert!((g.coeffs[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn constant_column_gives_zero() {
        let a = vec![1.0; 10];
        let b: Vec<f64> = (0..10).map(f64::from).collect();
        let (g, _) = estimate_coefficients(&matrix(&[a, b]), &[vec![0, 1]], 2, 4).unwrap();
        assert_eq!(g.coeffs[0], 0.0);
    }

    #[test]
    fn too_few_rows_reduces_bins() {
        let a = vec![0.0, 1.0, 2.0];
        let (_, warnings) = estimate_coefficients(&matrix(&[a.clone(), a]), &[vec![0, 1]], 2, 4).unwrap();
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn text_round_trip() {
        let g = CouplingGraph::new(
            3,
            3,
            vec![vec![0, 1], vec![1, 2], vec![0, 1, 2]],
            vec![0.1, 1.0 / 3.0, 0.0],
        )
        .unwrap()
        .with_strength(0.75);
        assert_eq!(CouplingGraph::from_text(&g.to_text()).unwrap(), g);
    }
}
