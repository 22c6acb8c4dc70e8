mod common;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use qfe_core::dataset::{NormMode, NormStats};
use qfe_core::hamiltonian::TopologyKind;
use qfe_core::qsim::{extract_batch, FeatureLayout, QuantumConfig};
use qfe_core::surrogate::{fit_ridge, parse_model, ridge_objective, write_model, LiftSpec, SurrogateModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{gradient_descent_ridge, random_graph, random_lift, random_matrix};

#[test]
fn closed_form_matches_gradient_descent() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let z = random_matrix(&mut rng, 20, 5);
    let y = random_matrix(&mut rng, 20, 8);
    let lambda = 0.05;
    let model = fit_ridge(&z, &y, lambda, &LiftSpec::Identity).unwrap();
    let (w, b) = gradient_descent_ridge(&z, &y, lambda);
    assert!((&model.weights - &w).norm() <= 1e-6);
    assert!((&model.bias - &b).norm() <= 1e-6);
}

#[test]
fn training_point_reproduced_when_interpolating() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let graph = random_graph(&mut rng, 4, TopologyKind::Line, 2);
    let inputs = random_matrix(&mut rng, 10, 4);
    let targets = extract_batch(&inputs, &graph, &QuantumConfig::new(4))
        .unwrap()
        .into_matrix()
        .unwrap();
    // 34 cubic monomials over 4 inputs >= 10 samples
    let model = fit_ridge(&inputs, &targets, 1e-10, &LiftSpec::Polynomial { degree: 3 }).unwrap();
    assert!(model.lift.output_dim() >= inputs.nrows());
    let pred = model.predict_batch(&inputs).unwrap();
    assert!((pred - &targets).amax() <= 1e-4);
}

#[test]
fn null_model_predicts_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut model = fit_ridge(
        &random_matrix(&mut rng, 6, 3),
        &random_matrix(&mut rng, 6, 2),
        0.1,
        &LiftSpec::Identity,
    )
    .unwrap();
    model.weights.fill(0.0);
    model.bias.fill(0.0);
    assert_eq!(model.predict(&[0.3, -0.2, 0.9]).unwrap(), vec![0.0, 0.0]);
}

#[test]
fn coverage_flags_subsample_points_and_outliers() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let inputs = random_matrix(&mut rng, 30, 3);
    let targets = random_matrix(&mut rng, 30, 2);
    let mut norm = NormStats::fit(&inputs, NormMode::MinMaxSymmetric);
    norm.clamp = false;
    let normalized = norm.apply_matrix(&inputs).unwrap();
    let layout = FeatureLayout {
        n: 2,
        subsets: Vec::new(),
    };
    let model = SurrogateModel::fit(&normalized, &targets, 0.1, &LiftSpec::Identity, norm.clone(), layout).unwrap();
    for i in 0..inputs.nrows() {
        let row: Vec<f64> = inputs.row(i).iter().copied().collect();
        let flag = model.coverage_flag(&row).unwrap();
        assert!(flag.in_coverage);
        assert_abs_diff_eq!(flag.distance, 0.0, epsilon = 1e-12);
    }
    // raw point mapping to (10, 10, 10) after normalization
    let far: Vec<f64> = (0..3).map(|j| 10.0 * norm.scale[j] + norm.shift[j]).collect();
    assert!(!model.coverage_flag(&far).unwrap().in_coverage);
}

#[test]
fn ridge_weights_shrink_to_means_at_huge_lambda() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let z = random_matrix(&mut rng, 25, 4);
    let y = random_matrix(&mut rng, 25, 3);
    let model = fit_ridge(&z, &y, 1e8, &LiftSpec::Identity).unwrap();
    assert!(model.weights.amax() <= 1e-6);
    for j in 0..3 {
        assert_abs_diff_eq!(model.bias[j], y.column(j).mean(), epsilon = 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn perturbing_fit_never_lowers_objective(seed in any::<u64>(), m in 3usize..30, d in 1usize..6, out in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = random_matrix(&mut rng, m, d);
        let y = random_matrix(&mut rng, m, out);
        let lambda = 10f64.powf(rng.random_range(-4.0..1.0));
        let model = fit_ridge(&z, &y, lambda, &LiftSpec::Identity).unwrap();
        let base = ridge_objective(&model.weights, &model.bias, lambda, &z, &y);
        for delta in [1e-3, -1e-3] {
            for idx in 0..model.weights.len() {
                let mut w = model.weights.clone();
                w[idx] += delta;
                prop_assert!(ridge_objective(&w, &model.bias, lambda, &z, &y) >= base - 1e-12);
            }
            for idx in 0..model.bias.len() {
                let mut b = model.bias.clone();
                b[idx] += delta;
                prop_assert!(ridge_objective(&model.weights, &b, lambda, &z, &y) >= base - 1e-12);
            }
        }
    }

    #[test]
    fn weight_norm_nonincreasing_in_lambda(seed in any::<u64>(), m in 3usize..40, d in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = random_matrix(&mut rng, m, d);
        let y = random_matrix(&mut rng, m, 3);
        let mut last = f64::INFINITY;
        for e in -6..=2 {
            let w = fit_ridge(&z, &y, 10f64.powi(e), &LiftSpec::Identity).unwrap().weights.norm();
            prop_assert!(w <= last * (1.0 + 1e-9) + 1e-12);
            last = w;
        }
    }

    #[test]
    fn degree_one_polynomial_equals_identity(seed in any::<u64>(), m in 3usize..30, d in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = random_matrix(&mut rng, m, d);
        let y = random_matrix(&mut rng, m, 2);
        let a = fit_ridge(&z, &y, 0.01, &LiftSpec::Identity).unwrap();
        let b = fit_ridge(&z, &y, 0.01, &LiftSpec::Polynomial { degree: 1 }).unwrap();
        let probe = random_matrix(&mut rng, 10, d);
        let diff = a.predict_batch(&probe).unwrap() - b.predict_batch(&probe).unwrap();
        prop_assert!(diff.amax() <= 1e-10);
    }

    #[test]
    fn overparameterized_fit_interpolates(seed in any::<u64>(), m in 2usize..12, extra in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = m + extra;
        let z = random_matrix(&mut rng, m, d);
        let y = random_matrix(&mut rng, m, 3);
        let model = fit_ridge(&z, &y, 1e-10, &LiftSpec::Identity).unwrap();
        let resid = model.predict_batch(&z).unwrap() - &y;
        prop_assert!(resid.amax() <= 1e-6);
    }

    #[test]
    fn batch_prediction_is_per_sample_prediction(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.random_range(1..5);
        let z = random_matrix(&mut rng, 12, d);
        let y = random_matrix(&mut rng, 12, 3);
        let model = fit_ridge(&z, &y, 0.01, &random_lift(&mut rng)).unwrap();
        let probe = random_matrix(&mut rng, 7, d);
        let batch = model.predict_batch(&probe).unwrap();
        for i in 0..7 {
            let row: Vec<f64> = probe.row(i).iter().copied().collect();
            let single = model.predict(&row).unwrap();
            for j in 0..3 {
                prop_assert_eq!(batch[(i, j)].to_bits(), single[j].to_bits());
            }
        }
    }

    #[test]
    fn saved_model_predicts_bit_identically(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.random_range(1..5);
        let z = random_matrix(&mut rng, 12, d);
        let y = random_matrix(&mut rng, 12, 3);
        let model = fit_ridge(&z, &y, 10f64.powf(rng.random_range(-8.0..2.0)), &random_lift(&mut rng)).unwrap();
        let loaded = parse_model(&write_model(&model)).unwrap();
        prop_assert_eq!(&loaded, &model);
        let probe = random_matrix(&mut rng, 20, d);
        let a = model.predict_batch(&probe).unwrap();
        let b = loaded.predict_batch(&probe).unwrap();
        prop_assert!(a.iter().zip(b.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}
