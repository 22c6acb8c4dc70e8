mod common;

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use proptest::prelude::*;
use qfe_core::dataset::{split, Dataset, NormMode, SplitSpec};
use qfe_core::downstream::{
    compare_pipelines, evaluate, parity_dataset, roc_auc, train_classifier, ClassifierKind, ParityInputs,
};
use qfe_core::hamiltonian::{
    build_hamiltonian, build_topology, enumerate_subsets, estimate_coefficients, CouplingGraph, TopologyKind,
};
use qfe_core::pipeline::{prepare, split_digest, LambdaChoice, PipelineSettings};
use qfe_core::qsim::FeatureLayout;
use qfe_core::subsample::{distance_matrix, k_medoids, medoid_cost, select_subsample, SubsampleSpec};
use qfe_core::surrogate::LiftSpec;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{brute_force_medoid_cost, random_matrix};

fn labelled(rng: &mut ChaCha8Rng, counts: &[usize], dim: usize) -> Dataset {
    let total: usize = counts.iter().sum();
    let mut labels: Vec<i64> = counts
        .iter()
        .enumerate()
        .flat_map(|(c, &k)| std::iter::repeat_n(c as i64, k))
        .collect();
    labels.shuffle(rng);
    let samples = DMatrix::from_fn(total, dim, |i, j| {
        labels[i] as f64 * 0.5 + rng.random_range(-3.0..3.0) * (j + 1) as f64
    });
    Dataset::new(samples, labels, (0..dim).map(|j| format!("f{j}")).collect()).unwrap()
}

#[test]
fn k_medoids_matches_brute_force_on_small_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..300 {
        let n = rng.random_range(1..=10);
        let k = rng.random_range(1..=2.min(n));
        let dim = rng.random_range(1..4);
        let pts = random_matrix(&mut rng, n, dim);
        let medoids = k_medoids(&pts, k, rng.random(), 100).unwrap();
        let dist = distance_matrix(&pts);
        assert_eq!(medoids.len(), k);
        assert!((medoid_cost(&dist, &medoids) - brute_force_medoid_cost(&dist, k)).abs() <= 1e-12);
    }
}

#[test]
fn k_medoids_is_swap_optimal() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..40 {
        let n = rng.random_range(2..=50);
        let k = rng.random_range(1..=6.min(n));
        let pts = random_matrix(&mut rng, n, 2);
        let medoids = k_medoids(&pts, k, rng.random(), 1000).unwrap();
        let dist = distance_matrix(&pts);
        let cost = medoid_cost(&dist, &medoids);
        for slot in 0..k {
            for cand in (0..n).filter(|c| !medoids.contains(c)) {
                let mut swapped = medoids.clone();
                swapped[slot] = cand;
                assert!(medoid_cost(&dist, &swapped) >= cost - 1e-12);
            }
        }
    }
}

#[test]
fn complete_graph_pairs() {
    for n in 2..9 {
        let top = build_topology(TopologyKind::Complete, n).unwrap();
        assert_eq!(enumerate_subsets(&top, 2).unwrap().len(), n * (n - 1) / 2);
    }
}

#[test]
fn random_scores_have_chance_auc() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let labels: Vec<bool> = (0..4000).map(|i| i % 2 == 0).collect();
    let scores: Vec<f64> = labels.iter().map(|_| rng.random()).collect();
    assert!((roc_auc(&scores, &labels) - 0.5).abs() <= 0.05);
}

#[test]
fn logistic_loss_decreases_monotonically() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..10 {
        let classes = rng.random_range(2..5);
        let x = random_matrix(&mut rng, 60, 3);
        let y: Vec<i64> = (0..60).map(|i| (i % classes) as i64).collect();
        let clf = train_classifier(&x, &y, ClassifierKind::MultinomialLogistic, 0).unwrap();
        assert!(clf.loss_history.windows(2).all(|w| w[1] <= w[0]));
    }
}

#[test]
fn full_subsample_surrogate_tracks_full_quantum() {
    let ds = parity_dataset(120, 4, &[0, 1], ParityInputs::default(), 3).unwrap();
    let settings = PipelineSettings {
        subsample_size: Some(96),
        lambda: LambdaChoice::Fixed(1e-10),
        lift: LiftSpec::Polynomial { degree: 3 },
        seed: 3,
        ..Default::default()
    };
    let report = compare_pipelines(&ds, &settings).unwrap();
    assert_eq!(report.subsample_size, report.train_size);
    let full = report.row("full-quantum").unwrap();
    let sur = report.row("surrogate").unwrap();
    assert!((full.accuracy - sur.accuracy).abs() <= 0.02, "{}", report.to_table());
    // parity labels: quantum features beat the raw inputs
    assert!(full.accuracy >= report.row("classical").unwrap().accuracy);
    let names: Vec<&str> = report.rows.iter().map(|r| r.approach.as_str()).collect();
    assert_eq!(names, ["classical", "full-quantum", "surrogate"]);
    let prep = prepare(&ds, &settings).unwrap();
    assert_eq!(report.split_digest, split_digest(&prep.split));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn normalization_is_idempotent(seed in any::<u64>(), rows in 2usize..30, zscore in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mode = if zscore { NormMode::ZScoreClipped } else { NormMode::MinMaxSymmetric };
        let ds = labelled(&mut rng, &[rows, 3], 3).normalize(mode);
        let again = ds.normalize(mode);
        prop_assert!((&again.samples - &ds.samples).amax() <= 1e-12);
        prop_assert!(ds.samples.iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn split_is_stratified_partition(seed in any::<u64>(), counts in prop::collection::vec(2usize..40, 2..5), f in 0.1f64..0.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ds = labelled(&mut rng, &counts, 2);
        let sp = split(&ds, &SplitSpec { test_fraction: f, seed }).unwrap();
        let train: BTreeSet<usize> = sp.train_idx.iter().copied().collect();
        let test: BTreeSet<usize> = sp.test_idx.iter().copied().collect();
        prop_assert!(train.is_disjoint(&test));
        prop_assert_eq!(train.len() + test.len(), ds.len());
        for (class, rows) in ds.class_rows() {
            let in_test = sp.test_idx.iter().filter(|&&i| ds.labels[i] == class).count();
            let nc = rows.len() as f64;
            prop_assert!(in_test >= 1 && in_test < rows.len());
            prop_assert!((in_test as f64 / nc - f).abs() <= 1.0 / nc + 1e-12);
        }
        for (k, &i) in sp.test_idx.iter().enumerate() {
            prop_assert_eq!(sp.test.row(k), ds.row(i));
        }
    }

    #[test]
    fn subsample_preserves_class_proportions(seed in any::<u64>(), counts in prop::collection::vec(1usize..40, 1..4), frac in 0.05f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ds = labelled(&mut rng, &counts, 2);
        let m = ((ds.len() as f64 * frac).ceil() as usize).max(counts.len());
        let spec = SubsampleSpec { size: m, seed, max_medoid_iters: 50 };
        let sub = select_subsample(&ds, &spec).unwrap();
        prop_assert_eq!(sub.len(), m);
        prop_assert_eq!(&sub, &select_subsample(&ds, &spec).unwrap());
        for (class, rows) in ds.class_rows() {
            let picked = sub.indices.iter().filter(|&&i| ds.labels[i] == class).count();
            prop_assert!(picked >= 1);
            let dev = (picked as f64 / m as f64 - rows.len() as f64 / ds.len() as f64).abs();
            prop_assert!(dev <= 1.0 / m as f64 + 1.0 / rows.len() as f64);
        }
    }

    #[test]
    fn coupling_coefficients_respect_symmetry_and_ranks(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = 60;
        let base = DMatrix::from_fn(rows, 3, |_, _| rng.random_range(-1.0..1.0));
        let mut data = base.clone();
        for i in 0..rows {
            data[(i, 1)] = 0.6 * data[(i, 0)] + 0.4 * data[(i, 1)];
        }
        let subsets = vec![vec![0, 1], vec![1, 2], vec![0, 1, 2]];
        let (g, _) = estimate_coefficients(&data, &subsets, 3, 4).unwrap();

        let mut swapped = data.clone();
        swapped.swap_columns(0, 1);
        let (gs, _) = estimate_coefficients(&swapped, &subsets, 3, 4).unwrap();
        prop_assert!((g.coeffs[0] - gs.coeffs[0]).abs() <= 1e-12);
        prop_assert!((g.coeffs[2] - gs.coeffs[2]).abs() <= 1e-12);

        let mut warped = data.clone();
        warped.column_mut(1).apply(|v| *v = (3.0 * *v).exp());
        let (gw, _) = estimate_coefficients(&warped, &subsets, 3, 4).unwrap();
        for (a, b) in g.coeffs.iter().zip(&gw.coeffs) {
            prop_assert!((a - b).abs() <= 0.05);
        }
    }

    #[test]
    fn hamiltonian_is_linear_in_fields(seed in any::<u64>(), alpha in -1.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let graph = common::random_graph(&mut rng, 4, TopologyKind::Ring, 3);
        let x = common::random_input(&mut rng, 4);
        let scaled: Vec<f64> = x.iter().map(|v| alpha * v).collect();
        let uncoupled = CouplingGraph::uncoupled(4, 3, graph.subsets.clone()).unwrap();
        let field = build_hamiltonian(&x, &uncoupled).unwrap().diagonal();
        let coupling = build_hamiltonian(&[0.0; 4], &graph).unwrap().diagonal();
        let h = build_hamiltonian(&scaled, &graph).unwrap().diagonal();
        for b in 0..16 {
            prop_assert!((h[b] - (alpha * field[b] + coupling[b])).abs() <= 1e-12);
        }
    }

    #[test]
    fn layout_length_counts_subsets(n in 2usize..9, k in 2usize..4, kind in 0usize..3) {
        let kind = [TopologyKind::Line, TopologyKind::Ring, TopologyKind::Complete][kind];
        let top = build_topology(kind, n).unwrap();
        let subsets = enumerate_subsets(&top, k).unwrap();
        let per_size: usize = (2..=k).map(|s| subsets.iter().filter(|c| c.len() == s).count()).sum();
        let graph = CouplingGraph::uncoupled(n, k, subsets).unwrap();
        prop_assert_eq!(FeatureLayout::from_graph(&graph).len(), n + per_size);
    }

    #[test]
    fn evaluation_ignores_sample_order(seed in any::<u64>(), centroid in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_matrix(&mut rng, 40, 3);
        let y: Vec<i64> = (0..40).map(|i| (x[(i, 0)] + 0.3 * x[(i, 1)] > 0.0) as i64 + 2 * (i % 2) as i64).collect();
        let kind = if centroid { ClassifierKind::NearestCentroid } else { ClassifierKind::MultinomialLogistic };
        let clf = train_classifier(&x, &y, kind, 0).unwrap();
        let mut order: Vec<usize> = (0..40).collect();
        order.shuffle(&mut rng);
        let xp = x.select_rows(order.iter());
        let yp: Vec<i64> = order.iter().map(|&i| y[i]).collect();
        let a = evaluate(&clf, &x, &y).unwrap();
        let b = evaluate(&clf, &xp, &yp).unwrap();
        prop_assert_eq!(a.confusion, b.confusion);
        prop_assert!((a.accuracy - b.accuracy).abs() <= 1e-15);
        prop_assert!((a.auc - b.auc).abs() <= 1e-12);
    }

    #[test]
    fn auc_invariant_under_monotone_maps(seed in any::<u64>(), n in 4usize..60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut labels: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        labels[0] = true;
        labels[1] = false;
        // coarse scores so ties occur
        let scores: Vec<f64> = (0..n).map(|_| (rng.random_range(-2.0..2.0) * 4.0f64).round() / 4.0).collect();
        let warped: Vec<f64> = scores.iter().map(|s| (2.0 * s).exp() - 5.0).collect();
        prop_assert!((roc_auc(&scores, &labels) - roc_auc(&warped, &labels)).abs() <= 1e-12);
    }
}
