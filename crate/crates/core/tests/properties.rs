mod common;

use common::er;
use graphtomo_core::dynamics::{detection_step, social_learning_step, var_step, Beliefs, DetectionSpec};
use graphtomo_core::inference::{
    aggregate_probes, classify_threshold, cluster_classify, error_rates, margins, theory_bias_gap, ProbeReport,
};
use graphtomo_core::{
    build_laplacian, build_metropolis, check_class, derive_seed, Adjacency, CombinationMatrix, EstimatorKind,
    ObservationSet,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn square(max: usize) -> impl Strategy<Value = DMatrix<f64>> {
    (2..=max).prop_flat_map(|n| {
        prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| DMatrix::from_vec(n, n, v))
    })
}

fn matrix_and_truth(max: usize) -> impl Strategy<Value = (DMatrix<f64>, Adjacency)> {
    square(max).prop_flat_map(|m| {
        let n = m.nrows();
        prop::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
            let truth = Adjacency::from_fn(n, |l, k| bits[l.min(k) * n + l.max(k)]);
            (m.clone(), truth)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn combination_rules_are_symmetric_with_equal_column_sums(
        n in 2usize..40, p in 0.0f64..1.0, rho in 0.05f64..0.95, lambda in 0.1f64..=1.0, seed: u64,
    ) {
        let g = er(n, p, seed);
        for a in [build_metropolis(&g, rho).unwrap(), build_laplacian(&g, rho, lambda).unwrap()] {
            let d = a.to_dense();
            prop_assert!(d.iter().all(|&v| v >= 0.0));
            prop_assert_eq!(&d, &d.transpose());
            prop_assert!(a.column_sum_error() <= 1e-12);
            prop_assert!(a.check_supported(&g).is_ok());
            prop_assert!(a.spectral_radius(200) <= rho * (1.0 + 1e-9));
            prop_assert!(CombinationMatrix::from_dense(&d).is_ok());
        }
    }

    #[test]
    fn metropolis_is_in_both_classes(n in 2usize..30, p in 0.05f64..1.0, rho in 0.1f64..0.95, seed: u64) {
        let g = er(n, p, seed);
        let report = check_class(&build_metropolis(&g, rho).unwrap(), &g).unwrap();
        prop_assert!(report.in_c1);
        prop_assert!(report.in_c2);
    }

    #[test]
    fn threshold_errors_are_monotone((m, truth) in matrix_and_truth(8), t1 in -1.2f64..1.2, t2 in -1.2f64..1.2) {
        let (lo, hi) = (t1.min(t2), t1.max(t2));
        let at_lo = error_rates(&classify_threshold(&m, lo), &truth).unwrap();
        let at_hi = error_rates(&classify_threshold(&m, hi), &truth).unwrap();
        prop_assert!(at_hi.e0 <= at_lo.e0);
        prop_assert!(at_hi.e1 >= at_lo.e1);
        let n = m.nrows();
        prop_assert_eq!(at_lo.n_connected + at_lo.n_disconnected, n * (n - 1));
        prop_assert!((0.0..=1.0).contains(&at_lo.e0) && (0.0..=1.0).contains(&at_lo.e1));
    }

    #[test]
    fn margins_are_ordered((m, truth) in matrix_and_truth(8), s_n in 0.1f64..50.0) {
        let r = margins(&m, &truth, s_n).unwrap();
        if let (Some(lo), Some(hi)) = (r.delta_lo, r.delta_hi) {
            prop_assert!(lo <= hi);
        }
        if let (Some(lo), Some(hi)) = (r.big_delta_lo, r.big_delta_hi) {
            prop_assert!(lo <= hi);
        }
    }

    #[test]
    fn clustering_ignores_positive_rescaling(m in square(8), c in 0.01f64..100.0, s_n in 0.5f64..20.0) {
        let base = cluster_classify(&m, s_n);
        let scaled = cluster_classify(&(&m * c), s_n);
        match (base, scaled) {
            (Ok((a, sa)), Ok((b, sb))) => {
                prop_assert_eq!(a, b);
                prop_assert_eq!(sa.degenerate, sb.degenerate);
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "rescaling changed the outcome"),
        }
    }

    #[test]
    fn probe_order_does_not_matter(
        decisions in prop::collection::vec(prop::collection::vec(any::<bool>(), 36), 6),
        rotation in 0usize..6,
    ) {
        let patches: Vec<ObservationSet> =
            (0..4).map(|i| ObservationSet::new(vec![3 * i, 3 * i + 1, 3 * i + 2], 12).unwrap()).collect();
        let mut reports = Vec::new();
        let mut idx = 0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                let bits = &decisions[idx];
                idx += 1;
                reports.push(ProbeReport {
                    nodes: patches[i].union(&patches[j]),
                    decision: Adjacency::from_fn(6, |l, k| bits[l * 6 + k]),
                    threshold: 0.0,
                    degenerate: false,
                    condition: None,
                });
            }
        }
        let forward = aggregate_probes(&reports).unwrap();
        reports.rotate_left(rotation);
        reports.reverse();
        prop_assert_eq!(aggregate_probes(&reports).unwrap(), forward);
    }

    #[test]
    fn theory_gap_is_positive(
        rho in 0.01f64..0.99, frac in 0.01f64..=1.0, xi in 0.0f64..=1.0, p in 0.0f64..=1.0,
    ) {
        for kind in EstimatorKind::ALL {
            let t = theory_bias_gap(kind, rho, rho * frac, xi, p).unwrap();
            prop_assert!(t.gamma > 0.0);
            prop_assert!(t.eta.is_finite());
        }
    }

    #[test]
    fn detection_step_is_a_var_step(
        n in 2usize..12, p in 0.1f64..1.0, mu in 0.01f64..0.99, seed: u64,
        w in prop::collection::vec(-5.0f64..5.0, 12), x in prop::collection::vec(-5.0f64..5.0, 12),
    ) {
        let g = er(n, p, seed);
        let c = graphtomo_core::combmat::metropolis_weights(&g);
        let spec = DetectionSpec { mu, mean0: -1.0, mean1: 1.0, variance: 1.0 };
        let a = CombinationMatrix::from_dense(&(c.transpose() * (1.0 - mu))).unwrap();
        let z: Vec<f64> = x[..n].iter().map(|&x| mu * 2.0 * x).collect();
        let lhs = detection_step(&w[..n], &c, &spec, &x[..n]).unwrap();
        let rhs = var_step(&a, &w[..n], &z);
        for (u, v) in lhs.iter().zip(&rhs) {
            prop_assert!((u - v).abs() <= 1e-14 * (1.0 + v.abs()));
        }
    }

    #[test]
    fn social_beliefs_stay_normalized(
        n in 2usize..8, hypotheses in 2usize..5, damping in 0.0f64..0.9, seed: u64,
        lik in prop::collection::vec(1e-6f64..1.0, 40),
    ) {
        let g = er(n, 0.5, seed);
        let c = graphtomo_core::combmat::metropolis_weights(&g);
        let l: Vec<Vec<f64>> = (0..n).map(|k| lik[k * hypotheses..(k + 1) * hypotheses].to_vec()).collect();
        let step = social_learning_step(&Beliefs::uniform(n, hypotheses), &l, &c, damping).unwrap();
        for beliefs in [&step.intermediate, &step.beliefs] {
            for row in beliefs.probabilities() {
                prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                prop_assert!(row.iter().all(|&q| q >= 0.0));
            }
        }
    }

    #[test]
    fn derived_seeds_separate_trials_and_sizes(master: u64, trial in 0u64..1000, n in 1u64..100_000) {
        prop_assert_ne!(derive_seed(master, trial, n), derive_seed(master, trial + 1, n));
        prop_assert_ne!(derive_seed(master, trial, n), derive_seed(master, trial, n + 1));
        prop_assert_eq!(derive_seed(master, trial, n), derive_seed(master, trial, n));
    }
}
