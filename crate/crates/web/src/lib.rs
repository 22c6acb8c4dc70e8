//! WebAssembly bindings for the browser demo: anneal trajectories, feature
//! maps over a 2-D input plane, and surrogate-vs-quantum comparisons.
//!
//! The demo works on `n` qubits on a line with every nearest-neighbour pair
//! coupled at the same strength, so the page needs no coupling estimation.

use nalgebra::DMatrix;
use qfe_core::hamiltonian::{build_hamiltonian, build_topology, enumerate_subsets, CouplingGraph, TopologyKind};
use qfe_core::qsim::{
    extract_features, ground_state_fidelity, initial_state, trotter_step, FeatureLayout, QuantumConfig,
    QuantumExtractor, ShotMode,
};
use qfe_core::surrogate::{fit_ridge, LiftSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wasm_bindgen::prelude::*;

/// Largest register the page will simulate.
pub const MAX_QUBITS: usize = 10;

pub type Result<T> = std::result::Result<T, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Line topology, pairs only, all coefficients `coupling`.
pub fn line_graph(n: usize, coupling: f64) -> Result<CouplingGraph> {
    if !(1..=MAX_QUBITS).contains(&n) {
        return Err(format!("qubit count must be in 1..={MAX_QUBITS}, got {n}"));
    }
    if n == 1 {
        return CouplingGraph::uncoupled(1, 1, Vec::new()).map_err(err);
    }
    let subsets = enumerate_subsets(&build_topology(TopologyKind::Line, n).map_err(err)?, 2).map_err(err)?;
    let coeffs = vec![1.0; subsets.len()];
    Ok(CouplingGraph::new(n, 2, subsets, coeffs)
        .map_err(err)?
        .with_strength(coupling))
}

fn config(n: usize, steps: usize, total_time: f64, cd: bool) -> QuantumConfig {
    let mut c = QuantumConfig::new(n);
    c.schedule.steps = steps;
    c.schedule.total_time = total_time;
    c.cd_enabled = cd;
    c
}

/// Row `k` (for `k = 0..=steps`) holds `<Z_0> .. <Z_{n-1}>` followed by the
/// ground-state fidelity after `k` Trotter steps; rows are concatenated.
pub fn anneal_trajectory(x: &[f64], coupling: f64, steps: usize, total_time: f64, cd: bool) -> Result<Vec<f64>> {
    let n = x.len();
    let graph = line_graph(n, coupling)?;
    let cfg = config(n, steps, total_time, cd);
    cfg.validate().map_err(err)?;
    let ham = build_hamiltonian(x, &graph).map_err(err)?;
    let diag = ham.diagonal();
    let singles = FeatureLayout { n, subsets: Vec::new() };
    let mut state = initial_state(n).map_err(err)?;
    let dt = total_time / steps as f64;
    let mut out = Vec::with_capacity((steps + 1) * (n + 1));
    for k in 0..=steps {
        if k > 0 {
            trotter_step(&mut state, &ham, &cfg, (k - 1) as f64 * dt, dt).map_err(err)?;
        }
        out.extend(extract_features(&state, &singles, ShotMode::Exact, 0).map_err(err)?.0);
        out.push(ground_state_fidelity(&state, &diag));
    }
    Ok(out)
}

/// The input plane: `x_0` along columns, `x_1` along rows, both over
/// `[-1, 1]` at `res` points; remaining inputs fixed at `rest`.
fn plane(res: usize, n: usize, rest: f64) -> Result<DMatrix<f64>> {
    if res < 2 {
        return Err("grid resolution must be at least 2".into());
    }
    if n < 2 {
        return Err("the feature map needs at least 2 qubits".into());
    }
    let coord = |i: usize| -1.0 + 2.0 * i as f64 / (res - 1) as f64;
    Ok(DMatrix::from_fn(res * res, n, |r, j| match j {
        0 => coord(r % res),
        1 => coord(r / res),
        _ => rest,
    }))
}

/// Feature `feature` of the layout (Z_0..Z_{n-1}, then the coupled pairs)
/// over the input plane, row-major with `x_1` as the row.
pub fn feature_map(n: usize, feature: usize, res: usize, coupling: f64, steps: usize, cd: bool) -> Result<Vec<f64>> {
    let graph = line_graph(n, coupling)?;
    let ex = QuantumExtractor::new(graph, config(n, steps, 1.0, cd)).map_err(err)?;
    if feature >= ex.layout().len() {
        return Err(format!(
            "feature {feature} out of range for {} features",
            ex.layout().len()
        ));
    }
    let m = ex.extract_batch(&plane(res, n, 0.0)?).into_matrix().map_err(err)?;
    Ok(m.column(feature).iter().copied().collect())
}

/// Quantum and surrogate values of one feature over the input plane.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub quantum: Vec<f64>,
    pub surrogate: Vec<f64>,
    /// Training inputs (`x_0, x_1` pairs) the surrogate was fitted on.
    pub points: Vec<f64>,
    pub rmse: f64,
    /// Quantum evolutions spent on the fit.
    pub evolutions: usize,
}

/// Fit a Ridge surrogate on `m` random points of the plane and compare it
/// with the quantum feature everywhere on a `res x res` grid.
pub fn compare_surrogate(
    n: usize,
    feature: usize,
    res: usize,
    m: usize,
    lift: &LiftSpec,
    lambda: f64,
    seed: u64,
) -> Result<Comparison> {
    let graph = line_graph(n, 1.0)?;
    let cfg = config(n, 8, 1.0, true);
    let train_ex = QuantumExtractor::new(graph.clone(), cfg).map_err(err)?;
    let layout_len = train_ex.layout().len();
    if feature >= layout_len {
        return Err(format!("feature {feature} out of range for {layout_len} features"));
    }
    if m == 0 {
        return Err("need at least one training point".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let train = DMatrix::from_fn(m, n, |_, j| if j < 2 { rng.random_range(-1.0..=1.0) } else { 0.0 });
    let targets = train_ex.extract_batch(&train).into_matrix().map_err(err)?;
    let model = fit_ridge(&train, &targets, lambda, lift).map_err(err)?;

    let grid = plane(res, n, 0.0)?;
    let quantum = QuantumExtractor::new(graph, cfg)
        .map_err(err)?
        .extract_batch(&grid)
        .into_matrix()
        .map_err(err)?;
    let predicted = model.predict_batch(&grid).map_err(err)?;
    let quantum: Vec<f64> = quantum.column(feature).iter().copied().collect();
    let surrogate: Vec<f64> = predicted.column(feature).iter().copied().collect();
    let sq: f64 = quantum.iter().zip(&surrogate).map(|(q, s)| (q - s).powi(2)).sum();
    Ok(Comparison {
        rmse: (sq / quantum.len() as f64).sqrt(),
        points: train.rows(0, m).columns(0, 2).transpose().iter().copied().collect(),
        quantum,
        surrogate,
        evolutions: train_ex.evolutions(),
    })
}

/// `"polynomial"` with `param` as the degree, or `"random-fourier"` with
/// `param` as the bandwidth.
pub fn parse_lift(kind: &str, param: f64, seed: u64) -> Result<LiftSpec> {
    match kind {
        "identity" => Ok(LiftSpec::Identity),
        "polynomial" => Ok(LiftSpec::Polynomial { degree: param as usize }),
        "random-fourier" => Ok(LiftSpec::RandomFourier {
            n_features: RFF_FEATURES,
            bandwidth: Some(param),
            seed,
        }),
        other => Err(format!("unknown lift '{other}'")),
    }
}

/// Random Fourier features used by the page.
pub const RFF_FEATURES: usize = 200;

/// Names of the feature components for `n` qubits on the demo line.
pub fn feature_names(n: usize) -> Result<Vec<String>> {
    Ok(FeatureLayout::from_graph(&line_graph(n, 1.0)?).descriptors())
}

// ---- JavaScript bindings ----

#[wasm_bindgen(js_name = annealTrajectory)]
pub fn anneal_trajectory_js(
    x: &[f64],
    coupling: f64,
    steps: usize,
    total_time: f64,
    cd: bool,
) -> std::result::Result<Vec<f64>, JsError> {
    anneal_trajectory(x, coupling, steps, total_time, cd).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = featureMap)]
pub fn feature_map_js(
    n: usize,
    feature: usize,
    res: usize,
    coupling: f64,
    steps: usize,
    cd: bool,
) -> std::result::Result<Vec<f64>, JsError> {
    feature_map(n, feature, res, coupling, steps, cd).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = featureNames)]
pub fn feature_names_js(n: usize) -> std::result::Result<Vec<String>, JsError> {
    feature_names(n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = SurrogateComparison)]
pub struct SurrogateComparisonJs(Comparison);

#[wasm_bindgen(js_class = SurrogateComparison)]
impl SurrogateComparisonJs {
    #[wasm_bindgen(getter)]
    pub fn quantum(&self) -> Vec<f64> {
        self.0.quantum.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn surrogate(&self) -> Vec<f64> {
        self.0.surrogate.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn points(&self) -> Vec<f64> {
        self.0.points.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn rmse(&self) -> f64 {
        self.0.rmse
    }

    #[wasm_bindgen(getter)]
    pub fn evolutions(&self) -> usize {
        self.0.evolutions
    }
}

#[wasm_bindgen(js_name = compareSurrogate)]
pub fn compare_surrogate_js(
    n: usize,
    feature: usize,
    res: usize,
    m: usize,
    lift: &str,
    lift_param: f64,
    lambda: f64,
    seed: u64,
) -> std::result::Result<SurrogateComparisonJs, JsError> {
    parse_lift(lift, lift_param, seed)
        .and_then(|lift| compare_surrogate(n, feature, res, m, &lift, lambda, seed))
        .map(SurrogateComparisonJs)
        .map_err(|e| JsError::new(&e))
}
