#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use qfe_core::hamiltonian::{build_topology, enumerate_subsets, estimate_coefficients, CouplingGraph, TopologyKind};
use qfe_core::subsample::medoid_cost;
use qfe_core::surrogate::LiftSpec;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random input in `[-1, 1]^n`.
pub fn random_input(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Coupling graph whose coefficients are estimated, as in the pipeline, from
/// `rows` random samples.
pub fn estimated_graph(rng: &mut ChaCha8Rng, n: usize, kind: TopologyKind, k: usize, rows: usize) -> CouplingGraph {
    let top = build_topology(kind, n).unwrap();
    let subsets = enumerate_subsets(&top, k).unwrap();
    let data = DMatrix::from_fn(rows, n, |_, _| rng.random_range(-1.0..1.0));
    estimate_coefficients(&data, &subsets, k, 4).unwrap().0
}

/// Coupling graph with coefficients drawn uniformly from `[0, 1]`.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, kind: TopologyKind, k: usize) -> CouplingGraph {
    let top = build_topology(kind, n).unwrap();
    let subsets = enumerate_subsets(&top, k).unwrap();
    let coeffs = subsets.iter().map(|_| rng.random_range(0.0..1.0)).collect();
    CouplingGraph::new(n, k, subsets, coeffs).unwrap()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

pub fn random_lift(rng: &mut ChaCha8Rng) -> LiftSpec {
    match rng.random_range(0..3) {
        0 => LiftSpec::Identity,
        1 => LiftSpec::Polynomial {
            degree: rng.random_range(1..=3),
        },
        _ => LiftSpec::RandomFourier {
            n_features: rng.random_range(1..40),
            bandwidth: if rng.random_bool(0.5) {
                None
            } else {
                Some(rng.random_range(0.2..3.0))
            },
            seed: rng.random(),
        },
    }
}

/// Cheapest medoid cost over every `k`-subset of the points.
pub fn brute_force_medoid_cost(dist: &[Vec<f64>], k: usize) -> f64 {
    fn go(dist: &[Vec<f64>], k: usize, from: usize, chosen: &mut Vec<usize>, best: &mut f64) {
        if chosen.len() == k {
            *best = best.min(medoid_cost(dist, chosen));
            return;
        }
        for i in from..dist.len() {
            chosen.push(i);
            go(dist, k, i + 1, chosen, best);
            chosen.pop();
        }
    }
    let mut best = f64::INFINITY;
    go(dist, k, 0, &mut Vec::with_capacity(k), &mut best);
    best
}

/// Minimize `(1/M)|Y - Z W^T - 1 b^T|^2 + lambda |W|^2` by Nesterov-accelerated
/// gradient descent on the joint `(W, b)`, never centering anything.
pub fn gradient_descent_ridge(z: &DMatrix<f64>, y: &DMatrix<f64>, lambda: f64) -> (DMatrix<f64>, DVector<f64>) {
    let (m, p) = z.shape();
    let d = y.ncols();
    let mut aug = DMatrix::from_element(m, p + 1, 1.0);
    aug.view_mut((0, 0), (m, p)).copy_from(z);
    // Lipschitz constant of the gradient.
    let top = aug.singular_values().max();
    let step = 1.0 / (2.0 * (top * top / m as f64 + lambda));
    let mut theta = DMatrix::<f64>::zeros(p + 1, d);
    let mut prev = theta.clone();
    let grad = |t: &DMatrix<f64>| {
        let resid = &aug * t - y;
        let mut g = aug.tr_mul(&resid) * (2.0 / m as f64);
        for i in 0..p {
            for j in 0..d {
                g[(i, j)] += 2.0 * lambda * t[(i, j)];
            }
        }
        g
    };
    for k in 0..200_000 {
        let momentum = k as f64 / (k as f64 + 3.0);
        let look = &theta + (&theta - &prev) * momentum;
        let g = grad(&look);
        prev = theta;
        theta = look - g * step;
        if k % 100 == 0 && grad(&theta).norm() < 1e-13 {
            break;
        }
    }
    let w = theta.rows(0, p).transpose();
    let b = theta.row(p).transpose();
    (w, b)
}
