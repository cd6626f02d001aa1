//! Deterministic input graphs shared by the benchmarks.

use dpgraph::graph::pairs;
use dpgraph::Graph;

/// Connected graph on `n` nodes: a Hamiltonian path plus every pair whose
/// index sum is divisible by `stride`.
pub fn banded_graph(n: usize, stride: usize) -> Graph {
    Graph::from_edges(
        n,
        pairs(n).filter(|&(i, j)| j == i + 1 || (i + j) % stride == 0),
    )
    .expect("valid pairs")
}
