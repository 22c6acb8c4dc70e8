use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::state::{initial_state, StateVector};
use super::QuantumConfig;
use crate::error::{Error, Result};
use crate::hamiltonian::build_hamiltonian;
use crate::hamiltonian::CouplingGraph;

/// Largest register the dense propagator oracle accepts.
pub const ORACLE_CAP: usize = 8;

/// Dense `-sum X_q` in the computational basis.
pub fn driver_matrix(n: usize) -> DMatrix<f64> {
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    for b in 0..dim {
        for q in 0..n {
            m[(b, b ^ (1 << q))] = -1.0;
        }
    }
    m
}

/// `exp(-i dt H) psi` for real symmetric `H` via its eigendecomposition.
pub fn propagate(h: DMatrix<f64>, dt: f64, psi: &[Complex64]) -> Vec<Complex64> {
    let eig = h.symmetric_eigen();
    let v = &eig.eigenvectors;
    let dim = psi.len();
    let re = DVector::from_iterator(dim, psi.iter().map(|a| a.re));
    let im = DVector::from_iterator(dim, psi.iter().map(|a| a.im));
    let cre = v.tr_mul(&re);
    let cim = v.tr_mul(&im);
    let mut pre = DVector::zeros(dim);
    let mut pim = DVector::zeros(dim);
    for k in 0..dim {
        let phase = Complex64::from_polar(1.0, -eig.eigenvalues[k] * dt);
        let c = Complex64::new(cre[k], cim[k]) * phase;
        pre[k] = c.re;
        pim[k] = c.im;
    }
    let ore = v * pre;
    let oim = v * pim;
    (0..dim).map(|b| Complex64::new(ore[b], oim[b])).collect()
}

/// Reference evolution under `A(t) H_i + B(t) H(x)` (no counterdiabatic
/// term): `substeps` piecewise-constant slices, each propagated exactly with
/// the Hamiltonian frozen at the slice midpoint.
pub fn exact_evolve_oracle(
    x: &[f64],
    graph: &CouplingGraph,
    config: &QuantumConfig,
    substeps: usize,
) -> Result<StateVector> {
    config.validate()?;
    let n = x.len();
    if n > ORACLE_CAP {
        return Err(Error::QubitCap { n, cap: ORACLE_CAP });
    }
    if substeps == 0 {
        return Err(Error::InvalidArgument("oracle needs at least one slice".into()));
    }
    let diag = build_hamiltonian(x, graph)?.diagonal();
    let driver = driver_matrix(n) * config.driver_strength;
    let mut psi: Vec<Complex64> = initial_state(n)?.amplitudes().to_vec();
    let dt = config.schedule.total_time / substeps as f64;
    for j in 0..substeps {
        let v = config.schedule.values((j as f64 + 0.5) * dt)?;
        let mut h = &driver * v.a;
        for (b, e) in diag.iter().enumerate() {
            h[(b, b)] += v.b * e;
        }
        psi = propagate(h, dt, &psi);
    }
    StateVector::from_amplitudes(n, psi)
}
