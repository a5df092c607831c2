//! Small named graphs used throughout tests, docs and the CLI.

use crate::graph::WeightedGraph;

/// Two weight-0 vertices joined by three parallel edges.
pub fn theta() -> WeightedGraph {
    WeightedGraph::from_indices(&[0, 0], &[(0, 1), (0, 1), (0, 1)])
}

/// Two weight-0 vertices, a loop at each, joined by a bridge (`e1`).
pub fn dumbbell() -> WeightedGraph {
    WeightedGraph::from_indices(&[0, 0], &[(0, 0), (0, 1), (1, 1)])
}

/// One weight-0 vertex with `k` loops.
pub fn rose(k: usize) -> WeightedGraph {
    WeightedGraph::from_indices(&[0], &vec![(0, 0); k])
}

/// One vertex of weight `g`, no edges.
pub fn single(g: u32) -> WeightedGraph {
    WeightedGraph::from_indices(&[g], &[])
}

/// Cycle on `n` weight-0 vertices (`n = 1` is a loop).
pub fn cycle(n: usize) -> WeightedGraph {
    cycle_weighted(&vec![0; n])
}

pub fn cycle_weighted(weights: &[u32]) -> WeightedGraph {
    let n = weights.len();
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    WeightedGraph::from_indices(weights, &edges)
}

pub fn triangle() -> WeightedGraph {
    cycle(3)
}

/// Complete graph on four weight-0 vertices.
pub fn k4() -> WeightedGraph {
    WeightedGraph::from_indices(
        &[0, 0, 0, 0],
        &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
    )
}

/// Two vertices with `k` parallel edges.
pub fn banana(k: usize) -> WeightedGraph {
    WeightedGraph::from_indices(&[0, 0], &vec![(0, 1); k])
}
