#![allow(dead_code)]

use graphtomo_core::graph::gen_er;
use graphtomo_core::{build_laplacian, build_metropolis, rng_from_seed, CombinationMatrix, Graph};

pub fn er(n: usize, p: f64, seed: u64) -> Graph {
    gen_er(n, p, &mut rng_from_seed(seed)).unwrap()
}

/// Metropolis for even seeds, Laplacian (lambda = 0.8) for odd ones.
pub fn alternating_rule(g: &Graph, rho: f64, seed: u64) -> CombinationMatrix {
    if seed.is_multiple_of(2) {
        build_metropolis(g, rho).unwrap()
    } else {
        build_laplacian(g, rho, 0.8).unwrap()
    }
}
