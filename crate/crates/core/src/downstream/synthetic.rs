use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// How the inputs of [`parity_dataset`] are spread over `[-1, 1]^dim`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParityInputs {
    /// Independent uniform coordinates.
    Uniform,
    /// Gaussian clusters of width `spread` at the corners `(±0.5, ..., ±0.5)`
    /// ("XOR blobs"). Points rarely sit near a sign boundary.
    Blobs { spread: f64 },
}

impl Default for ParityInputs {
    fn default() -> Self {
        ParityInputs::Blobs { spread: 0.1 }
    }
}

/// Synthetic data whose label is 1 when the product of the signs of the
/// columns in `parity` is positive, else 0. No linear function of the raw
/// inputs separates the classes once `parity` has two or more columns.
pub fn parity_dataset(
    n_samples: usize,
    dim: usize,
    parity: &[usize],
    inputs: ParityInputs,
    seed: u64,
) -> Result<Dataset> {
    if parity.is_empty() || parity.iter().any(|&j| j >= dim) {
        return Err(Error::InvalidArgument(format!(
            "parity columns {parity:?} must be non-empty and below {dim}"
        )));
    }
    let noise = match inputs {
        ParityInputs::Uniform => None,
        ParityInputs::Blobs { spread } => {
            Some(Normal::new(0.0, spread).map_err(|e| Error::InvalidArgument(format!("blob spread {spread}: {e}")))?)
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples: DMatrix<f64> = DMatrix::zeros(n_samples, dim);
    let mut labels = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        for j in 0..dim {
            samples[(i, j)] = match &noise {
                None => rng.random_range(-1.0..1.0),
                Some(normal) => {
                    let corner = if rng.random_bool(0.5) { 0.5 } else { -0.5 };
                    (corner + normal.sample(&mut rng)).clamp(-1.0, 1.0)
                }
            };
        }
        let sign: f64 = parity.iter().map(|&j| f64::signum(samples[(i, j)])).product();
        labels.push((sign > 0.0) as i64);
    }
    let names = (0..dim).map(|j| format!("x{j}")).collect();
    Dataset::new(samples, labels, names)
}
