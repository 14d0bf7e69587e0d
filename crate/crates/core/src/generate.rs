//! Seeded random instances for tests and benchmarks.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::io::maxcut_to_qubo;
use crate::model::QuboProblem;

/// Random QUBO where each upper-triangular entry is present with probability
/// `density`.
///
/// Entries follow the triplet-file convention: a diagonal draw `v` goes to
/// `c_i`, an off-diagonal draw `v` becomes the `x_i x_j` coefficient (split as
/// `v/2` on each side of `Q`). Integer instances draw from `-100..=100`, real
/// ones uniformly from `[-1, 1)`.
pub fn random_qubo(n: usize, density: f64, integer: bool, seed: u64) -> QuboProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = DMatrix::zeros(n, n);
    let mut c = DVector::zeros(n);
    for i in 0..n {
        for j in i..n {
            if rng.random::<f64>() >= density {
                continue;
            }
            let v = if integer {
                rng.random_range(-100i32..=100) as f64
            } else {
                rng.random_range(-1.0..1.0)
            };
            if i == j {
                c[i] = v;
            } else {
                q[(i, j)] = v / 2.0;
                q[(j, i)] = v / 2.0;
            }
        }
    }
    QuboProblem::new(q, c, 0.0).expect("generated problem is valid")
}

/// Random simple graph on `nodes` vertices with integer weights in `1..=max_weight`.
pub fn random_graph(nodes: usize, density: f64, max_weight: u32, seed: u64) -> Vec<(usize, usize, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..nodes {
        for j in i + 1..nodes {
            if rng.random::<f64>() < density {
                edges.push((i, j, rng.random_range(1..=max_weight.max(1)) as f64));
            }
        }
    }
    edges
}

/// The MaxCut QUBO of [`random_graph`].
pub fn random_maxcut(nodes: usize, density: f64, seed: u64) -> QuboProblem {
    maxcut_to_qubo(nodes, &random_graph(nodes, density, 10, seed)).expect("generated graph is simple")
}
