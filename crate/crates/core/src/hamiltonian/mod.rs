//! Data-encoded diagonal spin-glass Hamiltonian: longitudinal fields equal to
//! the normalized sample plus k-body z couplings on connected qubit subsets.
//!
//! Basis convention: qubit 0 is the most significant bit of a basis index and
//! bit value 0 carries z eigenvalue +1.

mod coupling;
mod schedule;
mod topology;

pub use coupling::{estimate_coefficients, normalized_dependence, quantile_bins, CouplingGraph};
pub use schedule::{Schedule, ScheduleKind, ScheduleValues};
pub use topology::{build_topology, enumerate_subsets, Topology, TopologyKind};

use crate::error::{Error, Result};

/// Bit mask of `qubits` in an `n`-qubit basis index.
pub fn qubit_mask(n: usize, qubits: &[usize]) -> usize {
    qubits.iter().fold(0, |m, &q| m | (1 << (n - 1 - q)))
}

/// `s_q(b)` for every qubit, i.e. +1 when the bit is 0.
pub fn spin(n: usize, basis: usize, qubit: usize) -> f64 {
    if basis >> (n - 1 - qubit) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Parity `prod_{q in mask} s_q(b)`.
#[inline]
pub fn parity(basis: usize, mask: usize) -> f64 {
    if (basis & mask).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataHamiltonian<'g> {
    pub fields: Vec<f64>,
    pub graph: &'g CouplingGraph,
}

impl<'g> DataHamiltonian<'g> {
    pub fn n(&self) -> usize {
        self.fields.len()
    }

    /// Eigenvalue for every computational basis state.
    pub fn diagonal(&self) -> Vec<f64> {
        let n = self.n();
        let field_masks: Vec<usize> = (0..n).map(|q| qubit_mask(n, &[q])).collect();
        let coupling_masks: Vec<usize> = self.graph.subsets.iter().map(|s| qubit_mask(n, s)).collect();
        let strength = self.graph.strength;
        (0..1usize << n)
            .map(|b| {
                let f: f64 = field_masks
                    .iter()
                    .zip(&self.fields)
                    .map(|(&m, &h)| h * parity(b, m))
                    .sum();
                let c: f64 = coupling_masks
                    .iter()
                    .zip(&self.graph.coeffs)
                    .map(|(&m, &c)| c * parity(b, m))
                    .sum();
                f + strength * c
            })
            .collect()
    }
}

/// Encode a normalized sample as longitudinal fields on top of `graph`.
pub fn build_hamiltonian<'g>(x: &[f64], graph: &'g CouplingGraph) -> Result<DataHamiltonian<'g>> {
    if x.len() != graph.n {
        return Err(Error::Dimension(format!(
            "sample has {} entries, coupling graph has {} qubits",
            x.len(),
            graph.n
        )));
    }
    if let Some(v) = x.iter().find(|v| !v.is_finite() || v.abs() > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "field {v} outside [-1, 1]; normalize inputs first"
        )));
    }
    Ok(DataHamiltonian {
        fields: x.to_vec(),
        graph,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_hamiltonian() {
        let g = CouplingGraph::uncoupled(3, 2, vec![vec![0, 1], vec![1, 2]]).unwrap();
        let h = build_hamiltonian(&[0.0; 3], &g).unwrap();
        assert!(h.diagonal().iter().all(|&e| e == 0.0));
    }

    #[test]
    fn two_spins_with_coupling() {
        let g = CouplingGraph::new(2, 2, vec![vec![0, 1]], vec![0.5]).unwrap();
        let h = build_hamiltonian(&[1.0, -1.0], &g).unwrap();
        assert_eq!(h.diagonal(), vec![0.5, 1.5, -2.5, 0.5]);
    }

    #[test]
    fn single_spin() {
        let g = CouplingGraph::uncoupled(1, 2, vec![]).unwrap();
        let h = build_hamiltonian(&[0.3], &g).unwrap();
        assert_eq!(h.diagonal(), vec![0.3, -0.3]);
    }

    #[test]
    fn dimension_and_range_errors() {
        let g = CouplingGraph::uncoupled(2, 2, vec![vec![0, 1]]).unwrap();
        assert!(matches!(build_hamiltonian(&[0.1], &g), Err(Error::Dimension(_))));
        assert!(build_hamiltonian(&[0.1, 1.5], &g).is_err());
    }

    #[test]
    fn field_part_is_linear() {
        let g = CouplingGraph::new(3, 3, vec![vec![0, 1], vec![1, 2], vec![0, 1, 2]], vec![0.2, 0.7, 0.4]).unwrap();
        let x = [0.4, -0.8, 0.3];
        let zero = build_hamiltonian(&[0.0; 3], &g).unwrap().diagonal();
        let full = build_hamiltonian(&x, &g).unwrap().diagonal();
        for alpha in [-1.0, 0.25, 0.5, 1.0] {
            let ax: Vec<f64> = x.iter().map(|v| alpha * v).collect();
            let scaled = build_hamiltonian(&ax, &g).unwrap().diagonal();
            for b in 0..8 {
                let expected = alpha * (full[b] - zero[b]) + zero[b];
                assert!((scaled[b] - expected).abs() < 1e-12);
            }
        }
    }
}
