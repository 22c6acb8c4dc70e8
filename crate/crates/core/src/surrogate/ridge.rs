use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Solution of the centered Ridge problem for every output column at once.
#[derive(Debug, Clone)]
pub struct RidgeSolution {
    /// `outputs x inputs`
    pub weights: DMatrix<f64>,
    pub bias: DVector<f64>,
}

fn column_means(m: &DMatrix<f64>) -> DVector<f64> {
    let rows = m.nrows() as f64;
    DVector::from_iterator(m.ncols(), m.column_iter().map(|c| c.sum() / rows))
}

fn center(m: &DMatrix<f64>, means: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] - means[j])
}

/// Solve `(A + shift I) X = B` for symmetric positive semi-definite `A`,
/// reusing one factorization for every column of `B`.
fn spd_solve(mut a: DMatrix<f64>, shift: f64, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    for i in 0..a.nrows() {
        a[(i, i)] += shift;
    }
    if let Some(chol) = a.clone().cholesky() {
        return Ok(chol.solve(b));
    }
    a.svd(true, true)
        .solve(b, 1e-14)
        .map_err(|e| Error::InvalidArgument(format!("ridge system is singular: {e}")))
}

/// Minimize `(1/M) sum_i |y_i - W z_i - b|^2 + lambda |W|_F^2` in closed form.
///
/// Inputs and targets are centered so the intercept stays unpenalized. With
/// more inputs than samples the equivalent `M x M` system
/// `W^T = Zc^T (Zc Zc^T + M lambda I)^-1 Yc` is solved instead of the
/// `p x p` one; both give the same minimizer.
pub fn solve_ridge(inputs: &DMatrix<f64>, targets: &DMatrix<f64>, lambda: f64) -> Result<RidgeSolution> {
    let m = inputs.nrows();
    if m != targets.nrows() {
        return Err(Error::Dimension(format!(
            "{m} input rows but {} target rows",
            targets.nrows()
        )));
    }
    if m < 2 {
        return Err(Error::InvalidArgument("ridge fit needs at least 2 samples".into()));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")));
    }
    if inputs.iter().chain(targets.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("ridge inputs or targets".into()));
    }
    let z_mean = column_means(inputs);
    let y_mean = column_means(targets);
    let zc = center(inputs, &z_mean);
    let yc = center(targets, &y_mean);
    let shift = m as f64 * lambda;

    let wt = if zc.ncols() <= m {
        spd_solve(zc.tr_mul(&zc), shift, &zc.tr_mul(&yc))?
    } else {
        let alpha = spd_solve(&zc * zc.transpose(), shift, &yc)?;
        zc.tr_mul(&alpha)
    };
    let weights = wt.transpose();
    let bias = &y_mean - &weights * &z_mean;
    Ok(RidgeSolution { weights, bias })
}

/// `(1/M) sum_i |y_i - W z_i - b|^2 + lambda |W|_F^2`.
pub fn ridge_objective(
    weights: &DMatrix<f64>,
    bias: &DVector<f64>,
    lambda: f64,
    inputs: &DMatrix<f64>,
    targets: &DMatrix<f64>,
) -> f64 {
    mean_squared_error(weights, bias, inputs, targets) * targets.ncols() as f64 + lambda * weights.norm_squared()
}

/// Mean over samples and outputs of the squared residual.
pub fn mean_squared_error(
    weights: &DMatrix<f64>,
    bias: &DVector<f64>,
    inputs: &DMatrix<f64>,
    targets: &DMatrix<f64>,
) -> f64 {
    let m = inputs.nrows();
    let mut total = 0.0;
    for i in 0..m {
        let pred = weights * inputs.row(i).transpose() + bias;
        total += (targets.row(i).transpose() - pred).norm_squared();
    }
    total / (m * targets.ncols()) as f64
}

/// Default search grid `1e-6, 1e-5, ..., 1e2`.
pub fn default_lambda_grid() -> Vec<f64> {
    (-6..=2).map(|e| 10f64.powi(e)).collect()
}

#[derive(Debug, Clone)]
pub struct CrossValidation {
    pub grid: Vec<f64>,
    pub mean_mse: Vec<f64>,
    pub std_err: Vec<f64>,
    /// Largest lambda whose mean error is within one standard error of the best.
    pub chosen: f64,
}

/// K-fold cross-validation of lambda (fold of row `i` is `i % folds`).
pub fn cross_validate(
    inputs: &DMatrix<f64>,
    targets: &DMatrix<f64>,
    grid: &[f64],
    folds: usize,
) -> Result<CrossValidation> {
    let m = inputs.nrows();
    let folds = folds.min(m);
    if folds < 2 || m < 4 {
        return Err(Error::InvalidArgument(format!(
            "cross-validation needs at least 4 samples and 2 folds, got {m} samples"
        )));
    }
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty lambda grid".into()));
    }
    let mut mean_mse = Vec::with_capacity(grid.len());
    let mut std_err = Vec::with_capacity(grid.len());
    for &lambda in grid {
        let mut errs = Vec::with_capacity(folds);
        for f in 0..folds {
            let train: Vec<usize> = (0..m).filter(|i| i % folds != f).collect();
            let val: Vec<usize> = (0..m).filter(|i| i % folds == f).collect();
            let sol = solve_ridge(
                &inputs.select_rows(train.iter()),
                &targets.select_rows(train.iter()),
                lambda,
            )?;
            errs.push(mean_squared_error(
                &sol.weights,
                &sol.bias,
                &inputs.select_rows(val.iter()),
                &targets.select_rows(val.iter()),
            ));
        }
        let k = errs.len() as f64;
        let mean = errs.iter().sum::<f64>() / k;
        let var = errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (k - 1.0);
        mean_mse.push(mean);
        std_err.push((var / k).sqrt());
    }
    let best = (0..grid.len())
        .min_by(|&a, &b| mean_mse[a].total_cmp(&mean_mse[b]))
        .unwrap();
    let limit = mean_mse[best] + std_err[best];
    let chosen = (0..grid.len())
        .filter(|&i| mean_mse[i] <= limit)
        .map(|i| grid[i])
        .fold(grid[best], f64::max);
    Ok(CrossValidation {
        grid: grid.to_vec(),
        mean_mse,
        std_err,
        chosen,
    })
}
