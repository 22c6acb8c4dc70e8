use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::DMatrix;

use super::features::{extract_features, FeatureLayout, FeatureVector};
use super::state::{initial_state, StateVector};
use super::QuantumConfig;
use crate::error::{Error, Result};
use crate::hamiltonian::{build_hamiltonian, CouplingGraph, DataHamiltonian};

/// Rate of the single-spin ground-state angle `theta = atan(B h / A)` for a
/// spin in `-A X + B h Z`. Zero where the angle is undefined (`A = B h = 0`).
pub fn cd_angle_rate(a: f64, b: f64, da: f64, db: f64, h: f64) -> f64 {
    let denom = a * a + b * b * h * h;
    if denom < 1e-300 {
        return 0.0;
    }
    (db * h * a - b * h * da) / denom
}

/// One first-order Trotter step over `[t, t + dt]` with `H(x)` already
/// diagonalized. Schedule values are taken at the slice midpoint.
pub(crate) fn step_diagonal(
    state: &mut StateVector,
    diag: &[f64],
    fields: &[f64],
    config: &QuantumConfig,
    t: f64,
    dt: f64,
) -> Result<()> {
    let v = config.schedule.values(t + dt / 2.0)?;
    let a = config.driver_strength * v.a;
    let da = config.driver_strength * v.da;
    state.apply_diagonal_phase(diag, dt * v.b);
    // exp(-i dt A (-X)) = Rx(-2 dt A)
    for q in 0..state.n() {
        state.apply_rx(q, -2.0 * dt * a);
    }
    if config.cd_enabled {
        for (q, &h) in fields.iter().enumerate() {
            let rate = cd_angle_rate(a, v.b, da, v.db, h);
            // exp(-i dt (rate / 2) Y) = Ry(dt * rate)
            state.apply_ry(q, dt * rate);
        }
    }
    Ok(())
}

/// Apply, in order: the diagonal problem phase `exp(-i dt B H(x))`, the driver
/// rotation `exp(-i dt A H_i)` with `H_i = -sum X_q`, and, when enabled, the
/// local counterdiabatic y-rotation of each qubit.
pub fn trotter_step(
    state: &mut StateVector,
    ham: &DataHamiltonian<'_>,
    config: &QuantumConfig,
    t: f64,
    dt: f64,
) -> Result<()> {
    if state.n() != ham.n() {
        return Err(Error::Dimension(format!(
            "state has {} qubits, Hamiltonian {}",
            state.n(),
            ham.n()
        )));
    }
    step_diagonal(state, &ham.diagonal(), &ham.fields, config, t, dt)
}

/// Digitized anneal from `|+>^n` through `config.schedule.steps` uniform steps.
pub fn evolve(x: &[f64], graph: &CouplingGraph, config: &QuantumConfig) -> Result<StateVector> {
    config.validate()?;
    let ham = build_hamiltonian(x, graph)?;
    let diag = ham.diagonal();
    let mut state = initial_state(ham.n())?;
    let steps = config.schedule.steps;
    let dt = config.schedule.total_time / steps as f64;
    for j in 0..steps {
        step_diagonal(&mut state, &diag, &ham.fields, config, j as f64 * dt, dt)?;
    }
    Ok(state)
}

/// Probability mass on the ground space of the (diagonal) problem Hamiltonian.
pub fn ground_state_fidelity(state: &StateVector, diag: &[f64]) -> f64 {
    let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
    state
        .probabilities()
        .iter()
        .zip(diag)
        .filter(|(_, &e)| e <= min + 1e-9)
        .map(|(p, _)| p)
        .sum()
}

/// Per-sample seed for shot sampling, independent of batch scheduling.
pub fn sample_seed(seed: u64, index: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Feature extractor bound to one coupling graph and configuration. Counts how
/// many evolutions it has run.
#[derive(Debug)]
pub struct QuantumExtractor {
    graph: CouplingGraph,
    config: QuantumConfig,
    layout: FeatureLayout,
    evolutions: AtomicUsize,
}

/// Per-sample outcome of a batch, in input order.
#[derive(Debug)]
pub struct BatchOutput {
    pub results: Vec<Result<FeatureVector>>,
}

impl BatchOutput {
    /// Stack into a matrix, failing on the first sample that errored.
    pub fn into_matrix(self) -> Result<DMatrix<f64>> {
        let mut rows = Vec::with_capacity(self.results.len());
        for (index, r) in self.results.into_iter().enumerate() {
            rows.push(r.map_err(|e| Error::Sample {
                index,
                source: Box::new(e),
            })?);
        }
        let d = rows.first().map(FeatureVector::len).unwrap_or(0);
        Ok(DMatrix::from_fn(rows.len(), d, |i, j| rows[i].0[j]))
    }

    pub fn into_vectors(self) -> Result<Vec<FeatureVector>> {
        self.results
            .into_iter()
            .enumerate()
            .map(|(index, r)| {
                r.map_err(|e| Error::Sample {
                    index,
                    source: Box::new(e),
                })
            })
            .collect()
    }
}

impl QuantumExtractor {
    pub fn new(graph: CouplingGraph, config: QuantumConfig) -> Result<Self> {
        config.validate()?;
        if graph.n != config.n {
            return Err(Error::Dimension(format!(
                "coupling graph has {} qubits, config {}",
                graph.n, config.n
            )));
        }
        let layout = FeatureLayout::from_graph(&graph);
        Ok(QuantumExtractor {
            graph,
            config,
            layout,
            evolutions: AtomicUsize::new(0),
        })
    }

    pub fn layout(&self) -> &FeatureLayout {
        &self.layout
    }

    pub fn graph(&self) -> &CouplingGraph {
        &self.graph
    }

    pub fn config(&self) -> &QuantumConfig {
        &self.config
    }

    /// Number of `evolve` calls made so far.
    pub fn evolutions(&self) -> usize {
        self.evolutions.load(Ordering::Relaxed)
    }

    pub fn evolve(&self, x: &[f64]) -> Result<StateVector> {
        self.evolutions.fetch_add(1, Ordering::Relaxed);
        evolve(x, &self.graph, &self.config)
    }

    /// Features of one sample; `index` only feeds the shot-sampling seed.
    pub fn features(&self, x: &[f64], index: usize) -> Result<FeatureVector> {
        let state = self.evolve(x)?;
        extract_features(
            &state,
            &self.layout,
            self.config.shots,
            sample_seed(self.config.seed, index),
        )
    }

    /// Features for every row, order preserved. Failing rows are reported in
    /// place and do not stop the batch.
    pub fn extract_batch(&self, samples: &DMatrix<f64>) -> BatchOutput {
        let rows: Vec<Vec<f64>> = samples.row_iter().map(|r| r.iter().copied().collect()).collect();
        self.extract_rows(&rows, 0)
    }

    /// Like [`QuantumExtractor::extract_batch`]; `first_index` offsets the
    /// per-sample seeds so a batch split in pieces samples identically.
    pub fn extract_rows(&self, rows: &[Vec<f64>], first_index: usize) -> BatchOutput {
        let run = |(i, x): (usize, &Vec<f64>)| self.features(x, first_index + i);
        #[cfg(feature = "parallel")]
        let results = {
            use rayon::prelude::*;
            rows.par_iter().enumerate().map(run).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let results = rows.iter().enumerate().map(run).collect();
        BatchOutput { results }
    }
}

/// Convenience wrapper around [`QuantumExtractor::extract_batch`].
pub fn extract_batch(samples: &DMatrix<f64>, graph: &CouplingGraph, config: &QuantumConfig) -> Result<BatchOutput> {
    Ok(QuantumExtractor::new(graph.clone(), *config)?.extract_batch(samples))
}
