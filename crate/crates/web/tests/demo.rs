use qfe_core::qsim::{evolve, QuantumConfig};
use qfe_core::surrogate::LiftSpec;
use qfe_web::{anneal_trajectory, compare_surrogate, feature_map, feature_names, line_graph, parse_lift};

#[test]
fn trajectory_starts_in_plus_state_and_ends_at_evolve() {
    let x = [0.8, -0.4, 0.3];
    let steps = 12;
    let traj = anneal_trajectory(&x, 1.0, steps, 1.0, true).unwrap();
    let width = x.len() + 1;
    assert_eq!(traj.len(), (steps + 1) * width);
    // |+>^n has zero magnetization everywhere
    assert!(traj[..x.len()].iter().all(|z| z.abs() < 1e-12));

    let graph = line_graph(3, 1.0).unwrap();
    let mut cfg = QuantumConfig::new(3);
    cfg.schedule.steps = steps;
    let probs = evolve(&x, &graph, &cfg).unwrap().probabilities();
    let z0: f64 = probs
        .iter()
        .enumerate()
        .map(|(b, p)| if b & 0b100 == 0 { *p } else { -*p })
        .sum();
    assert!((traj[steps * width] - z0).abs() < 1e-12);
}

#[test]
fn feature_map_of_uncoupled_pair_is_symmetric() {
    let res = 5;
    let z0 = feature_map(2, 0, res, 0.0, 8, true).unwrap();
    let z1 = feature_map(2, 1, res, 0.0, 8, true).unwrap();
    assert_eq!(z0.len(), res * res);
    // swapping the plane axes swaps the two qubits
    for r in 0..res {
        for c in 0..res {
            assert!((z0[r * res + c] - z1[c * res + r]).abs() < 1e-12);
        }
    }
    assert!(z0.iter().all(|v| (-1.0..=1.0).contains(v)));
}

#[test]
fn surrogate_comparison_reports_quality_and_cost() {
    let cubic = parse_lift("polynomial", 3.0, 0).unwrap();
    let cmp = compare_surrogate(2, 2, 9, 80, &cubic, 1e-3, 5).unwrap();
    assert_eq!(cmp.evolutions, 80);
    assert_eq!(cmp.points.len(), 160);
    assert_eq!(cmp.quantum.len(), 81);
    // better than predicting the mean everywhere
    let mean = cmp.quantum.iter().sum::<f64>() / 81.0;
    let spread = (cmp.quantum.iter().map(|q| (q - mean).powi(2)).sum::<f64>() / 81.0).sqrt();
    assert!(cmp.rmse < 0.8 * spread, "{} vs {spread}", cmp.rmse);
    // an affine map cannot express the pair correlation
    let affine = compare_surrogate(2, 2, 9, 80, &parse_lift("identity", 0.0, 0).unwrap(), 1e-3, 5).unwrap();
    assert!(cmp.rmse < affine.rmse);
    // the near-step correlator is better served by a local kernel
    let rff = compare_surrogate(2, 2, 9, 80, &parse_lift("random-fourier", 0.3, 1).unwrap(), 1e-4, 5).unwrap();
    assert!(rff.rmse < cmp.rmse, "{} vs {}", rff.rmse, cmp.rmse);
}

#[test]
fn bad_arguments_are_reported() {
    assert!(feature_map(2, 3, 5, 1.0, 8, true).is_err());
    assert!(feature_map(1, 0, 5, 1.0, 8, true).is_err());
    assert!(anneal_trajectory(&[], 1.0, 8, 1.0, true).is_err());
    assert!(anneal_trajectory(&[0.1], 1.0, 0, 1.0, true).is_err());
    assert!(compare_surrogate(2, 0, 9, 0, &LiftSpec::Identity, 1e-3, 0).is_err());
    assert!(parse_lift("spline", 1.0, 0).is_err());
}

#[test]
fn names_follow_the_layout() {
    assert_eq!(feature_names(3).unwrap(), ["Z0", "Z1", "Z2", "Z0Z1", "Z1Z2"]);
    assert_eq!(feature_names(1).unwrap(), ["Z0"]);
}
