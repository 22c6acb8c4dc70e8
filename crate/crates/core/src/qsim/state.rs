use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest register the dense statevector path accepts.
pub const QUBIT_CAP: usize = 20;

/// Dense `2^n` amplitude vector. Qubit 0 is the most significant bit of the
/// basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1usize << n {
            return Err(Error::Dimension(format!("{} amplitudes for {n} qubits", amps.len())));
        }
        Ok(StateVector { n, amps })
    }

    /// Computational basis state `|basis>`.
    pub fn basis(n: usize, basis: usize) -> Result<Self> {
        check_cap(n)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[basis] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm_sqr()
    }

    /// Multiply each amplitude by `exp(-i * scale * diag[b])`.
    pub fn apply_diagonal_phase(&mut self, diag: &[f64], scale: f64) {
        for (a, &e) in self.amps.iter_mut().zip(diag) {
            *a *= Complex64::from_polar(1.0, -scale * e);
        }
    }

    /// Apply the 2x2 unitary `[[u00, u01], [u10, u11]]` to `qubit`.
    pub fn apply_single_qubit(&mut self, qubit: usize, u: [[Complex64; 2]; 2]) {
        let stride = 1usize << (self.n - 1 - qubit);
        let dim = self.amps.len();
        let mut base = 0;
        while base < dim {
            for i in base..base + stride {
                let a0 = self.amps[i];
                let a1 = self.amps[i + stride];
                self.amps[i] = u[0][0] * a0 + u[0][1] * a1;
                self.amps[i + stride] = u[1][0] * a0 + u[1][1] * a1;
            }
            base += 2 * stride;
        }
    }

    /// `exp(-i angle/2 X)` on `qubit`.
    pub fn apply_rx(&mut self, qubit: usize, angle: f64) {
        let (s, c) = (angle / 2.0).sin_cos();
        let c = Complex64::new(c, 0.0);
        let mis = Complex64::new(0.0, -s);
        self.apply_single_qubit(qubit, [[c, mis], [mis, c]]);
    }

    /// `exp(-i angle/2 Y)` on `qubit`.
    pub fn apply_ry(&mut self, qubit: usize, angle: f64) {
        let (s, c) = (angle / 2.0).sin_cos();
        let c = Complex64::new(c, 0.0);
        let s = Complex64::new(s, 0.0);
        self.apply_single_qubit(qubit, [[c, -s], [s, c]]);
    }
}

pub(crate) fn check_cap(n: usize) -> Result<()> {
    if n > QUBIT_CAP {
        return Err(Error::QubitCap { n, cap: QUBIT_CAP });
    }
    Ok(())
}

/// `|+>^n`, the ground state of the transverse-field driver `-sum X_q`.
pub fn initial_state(n: usize) -> Result<StateVector> {
    check_cap(n)?;
    let dim = 1usize << n;
    let amp = Complex64::new((dim as f64).sqrt().recip(), 0.0);
    Ok(StateVector {
        n,
        amps: vec![amp; dim],
    })
}
