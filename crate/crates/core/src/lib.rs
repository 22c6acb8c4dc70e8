//! Quantum feature extraction on a small representative subsample, distilled
//! into a closed-form Ridge surrogate that replays the features classically
//! over the whole dataset.
//!
//! Modules follow the pipeline: [`dataset`] → [`subsample`] →
//! [`hamiltonian`] → [`qsim`] → [`surrogate`] → [`downstream`], with
//! [`pipeline`] wiring the stages together.

pub mod dataset;
pub mod downstream;
pub mod error;
pub mod hamiltonian;
pub mod pipeline;
pub mod qsim;
pub mod subsample;
pub mod surrogate;

pub use error::{Error, Result};
