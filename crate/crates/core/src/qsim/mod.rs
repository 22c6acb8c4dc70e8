//! Dense statevector simulation of the digitized counterdiabatic anneal and
//! extraction of z-parity features.

mod evolve;
mod features;
mod oracle;
mod state;

pub use evolve::{
    cd_angle_rate, evolve, extract_batch, ground_state_fidelity, sample_seed, trotter_step, BatchOutput,
    QuantumExtractor,
};
pub use features::{extract_features, features_from_csv, features_to_csv, sample_counts, FeatureLayout, FeatureVector};
pub use oracle::{driver_matrix, exact_evolve_oracle, propagate, ORACLE_CAP};
pub use state::{initial_state, StateVector, QUBIT_CAP};

use crate::error::{Error, Result};
use crate::hamiltonian::Schedule;

/// Exact expectation values or a finite number of measurement shots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShotMode {
    #[default]
    Exact,
    Shots(u64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumConfig {
    pub n: usize,
    pub schedule: Schedule,
    pub cd_enabled: bool,
    pub shots: ShotMode,
    pub seed: u64,
    /// Transverse-field scale multiplying the driver; 0 gives a purely
    /// diagonal evolution.
    pub driver_strength: f64,
}

impl QuantumConfig {
    pub fn new(n: usize) -> Self {
        QuantumConfig {
            n,
            schedule: Schedule::default(),
            cd_enabled: true,
            shots: ShotMode::Exact,
            seed: 0,
            driver_strength: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n > QUBIT_CAP {
            return Err(Error::QubitCap {
                n: self.n,
                cap: QUBIT_CAP,
            });
        }
        if let ShotMode::Shots(0) = self.shots {
            return Err(Error::InvalidArgument("shot count must be at least 1".into()));
        }
        if !self.driver_strength.is_finite() {
            return Err(Error::NonFinite("driver strength".into()));
        }
        self.schedule.validate()
    }
}
