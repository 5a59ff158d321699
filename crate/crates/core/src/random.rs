//! Seeded fixture generators used by the verification suites and the
//! `verify-equivalence` / `check-axioms` commands.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::Result;
use crate::ground::GroundSet;
use crate::oracles::{CovarianceSpec, UndirectedGraph};

/// A random undirected graph on `d` nodes: each of the `d(d-1)/2` edges
/// present independently with probability `edge_prob`. Deterministic per
/// seed.
pub fn random_graph(d: usize, edge_prob: f64, seed: u64) -> Result<UndirectedGraph> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..d {
        for v in u + 1..d {
            if rng.random_bool(edge_prob) {
                edges.push((u, v));
            }
        }
    }
    UndirectedGraph::new(GroundSet::new(d)?, &edges)
}

/// A random well-conditioned covariance: `A A^T / d + I/10` for `A` with
/// i.i.d. standard normal entries. Deterministic per seed.
pub fn random_covariance(d: usize, seed: u64) -> Result<CovarianceSpec> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let a = DMatrix::from_fn(d, d, |_, _| -> f64 {
        rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng)
    });
    let mut sigma = (&a * a.transpose()) / d as f64;
    for i in 0..d {
        sigma[(i, i)] += 0.1;
    }
    // symmetrize away rounding asymmetry from the product
    let sym = (&sigma + sigma.transpose()) * 0.5;
    CovarianceSpec::from_covariance(sym)
}
