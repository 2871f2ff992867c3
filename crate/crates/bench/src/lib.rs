//! Fixtures shared by the benchmarks.

use congest_sssp::graph::{gen_digraph, gen_graph, GraphKind};
use congest_sssp::{DirectedGraph, UndirectedGraph};

/// Random connected graph with `4n` edges and weights `1..=100`.
pub fn sparse_graph(n: usize, seed: u64) -> UndirectedGraph {
    gen_graph(GraphKind::Random, n, 4 * n, (1, 100), seed).expect("feasible density")
}

/// Random digraph with `4n` arcs, weights `0..=50`, all reachable from 0.
pub fn sparse_digraph(n: usize, seed: u64) -> DirectedGraph {
    gen_digraph(n, 4 * n, (0, 50), seed).expect("feasible density")
}
