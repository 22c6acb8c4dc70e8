use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::state::StateVector;
use super::ShotMode;
use crate::error::{Error, Result};
use crate::hamiltonian::{parity, qubit_mask, CouplingGraph};

/// Order of the feature components: one `<Z_q>` per qubit, then one parity
/// `<prod_{q in S} Z_q>` per coupling subset in graph order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureLayout {
    pub n: usize,
    pub subsets: Vec<Vec<usize>>,
}

impl FeatureLayout {
    pub fn from_graph(graph: &CouplingGraph) -> Self {
        FeatureLayout {
            n: graph.n,
            subsets: graph.subsets.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.n + self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Qubit sets for every component, singles first.
    pub fn components(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.n).map(|q| vec![q]).chain(self.subsets.iter().cloned())
    }

    pub fn masks(&self) -> Vec<usize> {
        self.components().map(|c| qubit_mask(self.n, &c)).collect()
    }

    /// Column names such as `Z0` or `Z1Z2`.
    pub fn descriptors(&self) -> Vec<String> {
        self.components()
            .map(|c| c.iter().map(|q| format!("Z{q}")).collect())
            .collect()
    }

    /// Inverse of [`FeatureLayout::descriptors`].
    pub fn from_descriptors(names: &[String]) -> Result<Self> {
        let parse = |name: &str| -> Result<Vec<usize>> {
            let parts: Vec<&str> = name.split('Z').collect();
            if parts.len() < 2 || !parts[0].is_empty() {
                return Err(Error::InvalidArgument(format!("bad feature descriptor '{name}'")));
            }
            parts[1..]
                .iter()
                .map(|p| p.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::InvalidArgument(format!("bad feature descriptor '{name}'")))
        };
        let comps: Vec<Vec<usize>> = names.iter().map(|n| parse(n)).collect::<Result<_>>()?;
        let n = comps.iter().take_while(|c| c.len() == 1).count();
        if comps[..n].iter().enumerate().any(|(i, c)| c[0] != i) {
            return Err(Error::InvalidArgument("single-qubit columns out of order".into()));
        }
        Ok(FeatureLayout {
            n,
            subsets: comps[n..].to_vec(),
        })
    }
}

/// Expectation values in layout order; every entry lies in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(pub Vec<f64>);

impl FeatureVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Measure every layout component on `state`, exactly or from `shots`
/// bitstrings drawn with `seed`.
pub fn extract_features(
    state: &StateVector,
    layout: &FeatureLayout,
    mode: ShotMode,
    seed: u64,
) -> Result<FeatureVector> {
    if layout.n != state.n() {
        return Err(Error::Dimension(format!(
            "layout for {} qubits, state has {}",
            layout.n,
            state.n()
        )));
    }
    let masks = layout.masks();
    let weights: Vec<f64> = match mode {
        ShotMode::Exact => state.probabilities(),
        ShotMode::Shots(shots) => {
            if shots == 0 {
                return Err(Error::InvalidArgument("shot count must be at least 1".into()));
            }
            sample_counts(&state.probabilities(), shots, seed)
                .into_iter()
                .map(|c| c as f64 / shots as f64)
                .collect()
        }
    };
    let values = masks
        .iter()
        .map(|&m| {
            let v: f64 = weights
                .iter()
                .enumerate()
                .filter(|(_, &p)| p != 0.0)
                .map(|(b, &p)| p * parity(b, m))
                .sum();
            v.clamp(-1.0, 1.0)
        })
        .collect();
    Ok(FeatureVector(values))
}

/// Histogram of `shots` draws from the distribution `probs`.
pub fn sample_counts(probs: &[f64], shots: u64, seed: u64) -> Vec<u64> {
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p;
        cumulative.push(acc);
    }
    let total = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        let u = rng.random::<f64>() * total;
        let idx = cumulative.partition_point(|&c| c <= u).min(probs.len() - 1);
        counts[idx] += 1;
    }
    counts
}

/// CSV with a descriptor header and one row per sample.
pub fn features_to_csv(layout: &FeatureLayout, rows: &[FeatureVector]) -> String {
    let mut s = layout.descriptors().join(",");
    s.push('\n');
    for r in rows {
        let cells: Vec<String> = r.0.iter().map(|v| v.to_string()).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// Parse a feature CSV written by [`features_to_csv`]. Extra trailing columns
/// that are not descriptors are rejected.
pub fn features_from_csv(text: &str) -> Result<(FeatureLayout, DMatrix<f64>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<String> = lines
        .next()
        .ok_or(Error::EmptyDataset)?
        .split(',')
        .map(|h| h.trim().to_string())
        .collect();
    let layout = FeatureLayout::from_descriptors(&header)?;
    let mut values = Vec::new();
    let mut rows = 0;
    for (r, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != header.len() {
            return Err(Error::Parse {
                row: r + 1,
                column: String::new(),
                message: format!("expected {} fields, found {}", header.len(), cells.len()),
            });
        }
        for (j, c) in cells.iter().enumerate() {
            values.push(c.trim().parse::<f64>().map_err(|_| Error::Parse {
                row: r + 1,
                column: header[j].clone(),
                message: format!("'{c}' is not a number"),
            })?);
        }
        rows += 1;
    }
    Ok((layout, DMatrix::from_row_slice(rows, header.len(), &values)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::initial_state;
    use num_complex::Complex64;

    fn pair_layout() -> FeatureLayout {
        FeatureLayout {
            n: 2,
            subsets: vec![vec![0, 1]],
        }
    }

    #[test]
    fn basis_state_parities() {
        let s = StateVector::basis(2, 0).unwrap();
        let f = extract_features(&s, &pair_layout(), ShotMode::Exact, 0).unwrap();
        assert_eq!(f.0, vec![1.0, 1.0, 1.0]);
        // |01>: qubit 1 flipped.
        let s = StateVector::basis(2, 1).unwrap();
        let f = extract_features(&s, &pair_layout(), ShotMode::Exact, 0).unwrap();
        assert_eq!(f.0, vec![1.0, -1.0, -1.0]);
    }

    #[test]
    fn plus_state_is_unpolarized() {
        let s = initial_state(2).unwrap();
        let f = extract_features(&s, &pair_layout(), ShotMode::Exact, 0).unwrap();
        assert!(f.0.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn bell_state() {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        let s = StateVector::from_amplitudes(2, vec![h, z, z, h]).unwrap();
        let f = extract_features(&s, &pair_layout(), ShotMode::Exact, 0).unwrap();
        assert!(f.0[0].abs() < 1e-15 && f.0[1].abs() < 1e-15);
        assert!((f.0[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn layout_mismatch() {
        let s = initial_state(3).unwrap();
        assert!(extract_features(&s, &pair_layout(), ShotMode::Exact, 0).is_err());
    }

    #[test]
    fn shots_are_seeded() {
        let s = initial_state(2).unwrap();
        let a = extract_features(&s, &pair_layout(), ShotMode::Shots(500), 3).unwrap();
        let b = extract_features(&s, &pair_layout(), ShotMode::Shots(500), 3).unwrap();
        let c = extract_features(&s, &pair_layout(), ShotMode::Shots(500), 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn descriptors_round_trip() {
        let layout = FeatureLayout {
            n: 12,
            subsets: vec![vec![0, 1], vec![10, 11], vec![1, 2, 3]],
        };
        let names = layout.descriptors();
        assert_eq!(names[12], "Z0Z1");
        assert_eq!(FeatureLayout::from_descriptors(&names).unwrap(), layout);
    }

    #[test]
    fn csv_round_trip() {
        let layout = pair_layout();
        let rows = vec![FeatureVector(vec![0.1, -0.25, 1.0 / 3.0])];
        let (l, m) = features_from_csv(&features_to_csv(&layout, &rows)).unwrap();
        assert_eq!(l, layout);
        assert_eq!(m[(0, 2)], 1.0 / 3.0);
    }
}
