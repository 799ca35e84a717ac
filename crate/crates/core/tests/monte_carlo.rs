mod common;

use common::er;
use graphtomo_core::dynamics::{analytic_correlations, empirical_correlations, simulate, SimulationOptions, SourceSpec};
use graphtomo_core::graph::{degree_stats, expected_degree};
use graphtomo_core::linalg::max_abs_diff;
use graphtomo_core::{build_metropolis, gen_partial_er, rng_from_seed, Graph, ObservationSet, Regime};

#[test]
fn edge_density_matches_p() {
    let (n, p) = (300, 0.05);
    let pairs = (n * (n - 1) / 2) as f64;
    let sd = (pairs * p * (1.0 - p)).sqrt();
    for seed in 0..5 {
        let edges = er(n, p, seed).edge_count() as f64;
        assert!((edges - pairs * p).abs() < 4.0 * sd, "seed {seed}: {edges}");
    }
}

#[test]
fn mean_degree_concentrates_in_the_sparse_regimes() {
    for regime in [Regime::LogSparse { c: 2.0 }, Regime::IntermediateSparse { exponent: 0.5 }] {
        let n = 2000;
        let p = regime.probability(n).unwrap();
        let mean = degree_stats(&er(n, p, 77)).mean;
        let expected = expected_degree(n, p);
        assert!((mean - expected).abs() / expected < 0.05, "{}: {mean} vs {expected}", regime.name());
    }
}

#[test]
fn partial_er_keeps_the_fixed_subgraph() {
    let s_graph = Graph::from_edges(6, &[(0, 1), (1, 2), (3, 5)]).unwrap();
    let (g, s) = gen_partial_er(&s_graph, 200, 0.1, &mut rng_from_seed(4)).unwrap();
    assert_eq!(s, ObservationSet::first(6));
    assert_eq!(g.induced(&s), s_graph);
    let latent_edges = g.edge_count() - s_graph.edge_count();
    let latent_pairs = (200 * 199 / 2 - 15) as f64;
    assert!((latent_edges as f64 - 0.1 * latent_pairs).abs() < 4.0 * (latent_pairs * 0.09).sqrt());
}

#[test]
fn empirical_correlations_approach_the_closed_form() {
    let g = er(10, 0.4, 3);
    let a = build_metropolis(&g, 0.6).unwrap();
    let exact = analytic_correlations(&a).unwrap();
    let stats = simulate(&a, &SourceSpec::StandardGaussian, &SimulationOptions::new(400_000), &mut rng_from_seed(1))
        .unwrap();
    let emp = empirical_correlations(&stats).unwrap();
    assert!(max_abs_diff(&emp.r0, &exact.r0) < 0.02);
    assert!(max_abs_diff(&emp.r1, &exact.r1) < 0.02);
}

#[test]
fn simulation_is_reproducible() {
    let g = er(15, 0.3, 8);
    let a = build_metropolis(&g, 0.5).unwrap();
    let opts = SimulationOptions::new(2_000).observe(ObservationSet::first(4));
    let run = |seed| {
        let stats = simulate(&a, &SourceSpec::StandardGaussian, &opts, &mut rng_from_seed(seed)).unwrap();
        empirical_correlations(&stats).unwrap()
    };
    assert_eq!(run(5), run(5));
    assert_ne!(run(5), run(6));
}
