//! Affine Ridge surrogate that maps normalized (optionally lifted) inputs to
//! quantum feature vectors, plus a nearest-reference coverage check.

mod io;
mod lift;
mod ridge;

pub use io::{load_model, parse_model, save_model, write_model, MODEL_FORMAT_VERSION};
pub use lift::{median_pairwise_distance, monomials, Lift, LiftSpec};
pub use ridge::{
    cross_validate, default_lambda_grid, mean_squared_error, ridge_objective, solve_ridge, CrossValidation,
    RidgeSolution,
};

use nalgebra::{DMatrix, DVector};

use crate::dataset::{NormMode, NormStats};
use crate::error::{Error, Result};
use crate::hamiltonian::CouplingGraph;
use crate::qsim::FeatureLayout;

/// Reference points (lifted subsample inputs) and the in-coverage radius.
#[derive(Debug, Clone, PartialEq)]
pub struct Coverage {
    pub refs: DMatrix<f64>,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageFlag {
    pub in_coverage: bool,
    pub distance: f64,
}

/// Linear-interpolation percentile (`q` in `[0, 100]`) of `values`.
pub fn percentile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    if v.is_empty() {
        return f64::NAN;
    }
    let pos = q / 100.0 * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

impl Coverage {
    /// Radius = 95th percentile of each reference's distance to its nearest
    /// other reference.
    pub fn from_refs(refs: DMatrix<f64>) -> Self {
        let m = refs.nrows();
        let nn: Vec<f64> = (0..m)
            .map(|i| {
                (0..m)
                    .filter(|&j| j != i)
                    .map(|j| (refs.row(i) - refs.row(j)).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let radius = if m < 2 { 0.0 } else { percentile(&nn, 95.0) };
        Coverage { refs, radius }
    }

    pub fn nearest_distance(&self, z: &[f64]) -> f64 {
        self.refs
            .row_iter()
            .map(|r| r.iter().zip(z).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn flag(&self, z: &[f64]) -> CoverageFlag {
        let distance = self.nearest_distance(z);
        CoverageFlag {
            in_coverage: distance <= self.radius,
            distance,
        }
    }
}

/// Deployable surrogate `F(x) = W lift(norm(x)) + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateModel {
    /// `D x p`
    pub weights: DMatrix<f64>,
    pub bias: DVector<f64>,
    pub lambda: f64,
    pub lift: Lift,
    pub norm: NormStats,
    pub layout: FeatureLayout,
    pub coupling: Option<CouplingGraph>,
    pub coverage: Coverage,
}

/// Stats that leave inputs untouched, for data that is already normalized.
pub fn passthrough_norm(dim: usize) -> NormStats {
    NormStats {
        mode: NormMode::MinMaxSymmetric,
        shift: vec![0.0; dim],
        scale: vec![1.0; dim],
        clamp: false,
    }
}

/// Closed-form Ridge fit on already-normalized inputs with pass-through
/// normalization and a plain `D`-component layout.
pub fn fit_ridge(
    inputs: &DMatrix<f64>,
    targets: &DMatrix<f64>,
    lambda: f64,
    lift: &LiftSpec,
) -> Result<SurrogateModel> {
    let layout = FeatureLayout {
        n: targets.ncols(),
        subsets: Vec::new(),
    };
    SurrogateModel::fit(inputs, targets, lambda, lift, passthrough_norm(inputs.ncols()), layout)
}

impl SurrogateModel {
    /// Fit on normalized `inputs` (rows of the subsample) against the quantum
    /// feature `targets`.
    pub fn fit(
        inputs: &DMatrix<f64>,
        targets: &DMatrix<f64>,
        lambda: f64,
        lift: &LiftSpec,
        norm: NormStats,
        layout: FeatureLayout,
    ) -> Result<Self> {
        if targets.ncols() != layout.len() {
            return Err(Error::Dimension(format!(
                "targets have {} columns, layout has {}",
                targets.ncols(),
                layout.len()
            )));
        }
        if inputs.ncols() != norm.dim() {
            return Err(Error::Dimension(format!(
                "inputs have {} columns, normalization expects {}",
                inputs.ncols(),
                norm.dim()
            )));
        }
        let lift = Lift::resolve(lift, inputs.ncols(), inputs)?;
        let z = lift.apply_matrix(inputs);
        let sol = solve_ridge(&z, targets, lambda)?;
        Ok(SurrogateModel {
            weights: sol.weights,
            bias: sol.bias,
            lambda,
            lift,
            norm,
            layout,
            coupling: None,
            coverage: Coverage::from_refs(z),
        })
    }

    /// Choose lambda by cross-validation over `grid`, then fit on everything.
    pub fn fit_cv(
        inputs: &DMatrix<f64>,
        targets: &DMatrix<f64>,
        grid: &[f64],
        folds: usize,
        lift: &LiftSpec,
        norm: NormStats,
        layout: FeatureLayout,
    ) -> Result<(Self, CrossValidation)> {
        let resolved = Lift::resolve(lift, inputs.ncols(), inputs)?;
        let z = resolved.apply_matrix(inputs);
        let cv = cross_validate(&z, targets, grid, folds)?;
        // Pin the resolved bandwidth so the final fit uses the CV lift.
        let pinned = match (*lift, &resolved) {
            (LiftSpec::RandomFourier { n_features, seed, .. }, Lift::RandomFourier { bandwidth, .. }) => {
                LiftSpec::RandomFourier {
                    n_features,
                    bandwidth: Some(*bandwidth),
                    seed,
                }
            }
            (spec, _) => spec,
        };
        let model = SurrogateModel::fit(inputs, targets, cv.chosen, &pinned, norm, layout)?;
        Ok((model, cv))
    }

    pub fn with_coupling(mut self, graph: CouplingGraph) -> Self {
        self.coupling = Some(graph);
        self
    }

    pub fn input_dim(&self) -> usize {
        self.norm.dim()
    }

    pub fn output_dim(&self) -> usize {
        self.weights.nrows()
    }

    /// Check internal dimension consistency.
    pub fn validate(&self) -> Result<()> {
        let p = self.lift.output_dim();
        let d = self.layout.len();
        if self.weights.ncols() != p || self.weights.nrows() != d {
            return Err(Error::Dimension(format!(
                "weights are {}x{}, expected {d}x{p}",
                self.weights.nrows(),
                self.weights.ncols()
            )));
        }
        if self.bias.len() != d {
            return Err(Error::Dimension(format!(
                "bias has {} entries, expected {d}",
                self.bias.len()
            )));
        }
        if self.lift.input_dim() != self.norm.dim() {
            return Err(Error::Dimension(format!(
                "lift expects {} inputs, normalization has {}",
                self.lift.input_dim(),
                self.norm.dim()
            )));
        }
        if self.coverage.refs.ncols() != p {
            return Err(Error::Dimension(format!(
                "coverage references have {} columns, expected {p}",
                self.coverage.refs.ncols()
            )));
        }
        if !(self.lambda > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        Ok(())
    }

    /// Surrogate features for an input that is already normalized. Not
    /// clamped to `[-1, 1]`.
    pub fn predict_normalized(&self, x: &[f64]) -> Vec<f64> {
        let z = self.lift.apply(x);
        (0..self.weights.nrows())
            .map(|i| {
                let mut acc = self.bias[i];
                for (j, zj) in z.iter().enumerate() {
                    acc += self.weights[(i, j)] * zj;
                }
                acc
            })
            .collect()
    }

    /// Normalize a raw sample with the stored stats, lift, and apply `W z + b`.
    pub fn predict(&self, x: &[f64]) -> Result<Vec<f64>> {
        let xn = self.norm.apply(x)?;
        Ok(self.predict_normalized(&xn))
    }

    /// Row-wise [`SurrogateModel::predict`].
    pub fn predict_batch(&self, raw: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let mut out = DMatrix::zeros(raw.nrows(), self.output_dim());
        for (i, row) in raw.row_iter().enumerate() {
            let x: Vec<f64> = row.iter().copied().collect();
            for (j, v) in self.predict(&x)?.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        Ok(out)
    }

    /// Distance of a raw sample to the nearest subsample reference in lifted,
    /// normalized space, and whether it lies inside the coverage radius.
    pub fn coverage_flag(&self, x: &[f64]) -> Result<CoverageFlag> {
        let xn = self.norm.apply(x)?;
        Ok(self.coverage.flag(&self.lift.apply(&xn)))
    }

    /// Objective value on normalized inputs.
    pub fn objective(&self, inputs: &DMatrix<f64>, targets: &DMatrix<f64>) -> f64 {
        let z = self.lift.apply_matrix(inputs);
        ridge_objective(&self.weights, &self.bias, self.lambda, &z, targets)
    }

    /// Mean squared residual on normalized inputs.
    pub fn training_mse(&self, inputs: &DMatrix<f64>, targets: &DMatrix<f64>) -> f64 {
        let z = self.lift.apply_matrix(inputs);
        mean_squared_error(&self.weights, &self.bias, &z, targets)
    }
}
