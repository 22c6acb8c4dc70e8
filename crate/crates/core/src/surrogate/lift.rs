use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Requested input lift, before any data-dependent parameters are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum LiftSpec {
    #[default]
    Identity,
    /// All monomials of total degree `1..=degree` (degree at most 3).
    Polynomial { degree: usize },
    /// `sqrt(2/m) cos(w.x + b)` with `w ~ N(0, I / bandwidth^2)`; a missing
    /// bandwidth defaults to the median pairwise distance of the fit inputs.
    RandomFourier {
        n_features: usize,
        bandwidth: Option<f64>,
        seed: u64,
    },
}

impl LiftSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            LiftSpec::Identity => "identity",
            LiftSpec::Polynomial { .. } => "polynomial",
            LiftSpec::RandomFourier { .. } => "random-fourier",
        }
    }
}

/// A lift with every parameter fixed.
#[derive(Debug, Clone, PartialEq)]
pub enum Lift {
    Identity {
        dim: usize,
    },
    Polynomial {
        dim: usize,
        degree: usize,
        monomials: Vec<Vec<usize>>,
    },
    RandomFourier {
        dim: usize,
        bandwidth: f64,
        seed: u64,
        /// `n_features x dim`
        frequencies: DMatrix<f64>,
        phases: Vec<f64>,
    },
}

/// Index multisets of every monomial of degree `1..=degree` over `dim`
/// variables, by degree then lexicographic.
pub fn monomials(dim: usize, degree: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..degree {
        let mut next = Vec::new();
        for m in &layer {
            let start = m.last().copied().unwrap_or(0);
            for v in start..dim {
                let mut grown = m.clone();
                grown.push(v);
                next.push(grown);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Median of all pairwise Euclidean distances between rows.
pub fn median_pairwise_distance(points: &DMatrix<f64>) -> f64 {
    let n = points.nrows();
    let mut d = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            d.push((points.row(i) - points.row(j)).norm());
        }
    }
    if d.is_empty() {
        return 1.0;
    }
    d.sort_by(f64::total_cmp);
    let m = d.len();
    if m % 2 == 1 {
        d[m / 2]
    } else {
        (d[m / 2 - 1] + d[m / 2]) / 2.0
    }
}

impl Lift {
    /// Resolve `spec` for inputs of width `dim`; `fit_inputs` supplies the
    /// default random-Fourier bandwidth.
    pub fn resolve(spec: &LiftSpec, dim: usize, fit_inputs: &DMatrix<f64>) -> Result<Lift> {
        match *spec {
            LiftSpec::Identity => Ok(Lift::Identity { dim }),
            LiftSpec::Polynomial { degree } => {
                if !(1..=3).contains(&degree) {
                    return Err(Error::InvalidArgument(format!(
                        "polynomial lift degree must be 1, 2 or 3, got {degree}"
                    )));
                }
                Ok(Lift::Polynomial {
                    dim,
                    degree,
                    monomials: monomials(dim, degree),
                })
            }
            LiftSpec::RandomFourier {
                n_features,
                bandwidth,
                seed,
            } => {
                if n_features == 0 {
                    return Err(Error::InvalidArgument("random Fourier lift needs features".into()));
                }
                let bandwidth = match bandwidth {
                    Some(b) => b,
                    None => {
                        let m = median_pairwise_distance(fit_inputs);
                        if m > 0.0 {
                            m
                        } else {
                            1.0
                        }
                    }
                };
                if !(bandwidth > 0.0 && bandwidth.is_finite()) {
                    return Err(Error::InvalidArgument(format!(
                        "bandwidth must be positive, got {bandwidth}"
                    )));
                }
                Ok(Lift::random_fourier(dim, n_features, bandwidth, seed))
            }
        }
    }

    pub fn random_fourier(dim: usize, n_features: usize, bandwidth: f64, seed: u64) -> Lift {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut frequencies = DMatrix::zeros(n_features, dim);
        for k in 0..n_features {
            for j in 0..dim {
                let g: f64 = StandardNormal.sample(&mut rng);
                frequencies[(k, j)] = g / bandwidth;
            }
        }
        let phases = (0..n_features)
            .map(|_| rng.random::<f64>() * std::f64::consts::TAU)
            .collect();
        Lift::RandomFourier {
            dim,
            bandwidth,
            seed,
            frequencies,
            phases,
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            Lift::Identity { dim } | Lift::Polynomial { dim, .. } | Lift::RandomFourier { dim, .. } => *dim,
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            Lift::Identity { dim } => *dim,
            Lift::Polynomial { monomials, .. } => monomials.len(),
            Lift::RandomFourier { phases, .. } => phases.len(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Lift::Identity { .. } => "identity",
            Lift::Polynomial { .. } => "polynomial",
            Lift::RandomFourier { .. } => "random-fourier",
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Lift::Identity { .. } => x.to_vec(),
            Lift::Polynomial { monomials, .. } => monomials.iter().map(|m| m.iter().map(|&j| x[j]).product()).collect(),
            Lift::RandomFourier {
                frequencies, phases, ..
            } => {
                let scale = (2.0 / phases.len() as f64).sqrt();
                phases
                    .iter()
                    .enumerate()
                    .map(|(k, &b)| {
                        let dot: f64 = frequencies.row(k).iter().zip(x).map(|(w, v)| w * v).sum();
                        scale * (dot + b).cos()
                    })
                    .collect()
            }
        }
    }

    pub fn apply_matrix(&self, inputs: &DMatrix<f64>) -> DMatrix<f64> {
        let p = self.output_dim();
        let mut out = DMatrix::zeros(inputs.nrows(), p);
        for (i, row) in inputs.row_iter().enumerate() {
            let x: Vec<f64> = row.iter().copied().collect();
            for (j, v) in self.apply(&x).into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials(3, 1), vec![vec![0], vec![1], vec![2]]);
        // 3 linear + 6 quadratic
        assert_eq!(monomials(3, 2).len(), 9);
        // + 10 cubic
        assert_eq!(monomials(3, 3).len(), 19);
    }

    #[test]
    fn polynomial_values() {
        let lift = Lift::resolve(&LiftSpec::Polynomial { degree: 2 }, 2, &DMatrix::zeros(0, 2)).unwrap();
        // x0, x1, x0^2, x0 x1, x1^2
        assert_eq!(lift.apply(&[2.0, 3.0]), vec![2.0, 3.0, 4.0, 6.0, 9.0]);
    }

    #[test]
    fn degree_limits() {
        let empty = DMatrix::zeros(0, 2);
        assert!(Lift::resolve(&LiftSpec::Polynomial { degree: 0 }, 2, &empty).is_err());
        assert!(Lift::resolve(&LiftSpec::Polynomial { degree: 4 }, 2, &empty).is_err());
    }

    #[test]
    fn random_fourier_approximates_gaussian_kernel() {
        let lift = Lift::random_fourier(3, 4000, 0.8, 5);
        let x = [0.1, -0.4, 0.3];
        let y = [0.5, 0.0, -0.2];
        let zx = lift.apply(&x);
        let zy = lift.apply(&y);
        let approx: f64 = zx.iter().zip(&zy).map(|(a, b)| a * b).sum();
        let d2: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum();
        let exact = (-d2 / (2.0 * 0.8 * 0.8)).exp();
        assert!((approx - exact).abs() < 0.05, "{approx} vs {exact}");
    }

    #[test]
    fn median_distance() {
        let p = DMatrix::from_row_slice(3, 1, &[0.0, 1.0, 3.0]);
        // distances 1, 3, 2
        assert_eq!(median_pairwise_distance(&p), 2.0);
    }
}
