use serde::{Deserialize, Serialize};

use crate::distance::{Distance, PathLen, VertexId};
use crate::graph::{Edge, UndirectedGraph};
use crate::oracle::limited::run_all;

/// Explicit skeleton graph on the virtual vertices: `u', v'` are adjacent with
/// weight `d^(h)(u', v')` whenever some path of at most `h` edges joins them.
/// Only oracles build this; the distributed algorithm never materializes it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkeletonGraph {
    /// Sorted virtual vertices; skeleton vertex `i` is `virtuals[i]`.
    pub virtuals: Vec<VertexId>,
    pub hop_limit: usize,
    /// `(u', v', w)` with `u' < v'` in original ids.
    pub edges: Vec<SkeletonEdge>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkeletonEdge {
    pub u: VertexId,
    pub v: VertexId,
    pub len: PathLen,
}

impl SkeletonGraph {
    pub fn index_of(&self, v: VertexId) -> Option<usize> {
        self.virtuals.binary_search(&v).ok()
    }

    /// The skeleton as a graph on indices `0..|V'|`.
    pub fn as_graph(&self) -> UndirectedGraph {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge::new(self.index_of(e.u).unwrap(), self.index_of(e.v).unwrap(), e.len.dist.finite().unwrap()))
            .collect();
        UndirectedGraph::from_edges(self.virtuals.len(), edges).expect("skeleton is simple")
    }

    pub fn weight(&self, u: VertexId, v: VertexId) -> Option<Distance> {
        let (a, b) = (u.min(v), u.max(v));
        self.edges.iter().find(|e| e.u == a && e.v == b).map(|e| e.len.dist)
    }
}

pub fn build_skeleton_oracle(g: &UndirectedGraph, virtuals: &[VertexId], h: usize) -> SkeletonGraph {
    let mut vs = virtuals.to_vec();
    vs.sort_unstable();
    vs.dedup();
    let runs = run_all(g, &vs, h);
    let mut edges = Vec::new();
    for (i, run) in runs.iter().enumerate() {
        for &u in &vs[..i] {
            if let Some(len) = run.len_at(u, h) {
                edges.push(SkeletonEdge { u, v: vs[i], len });
            }
        }
    }
    edges.sort_unstable_by_key(|e| (e.u, e.v));
    SkeletonGraph { virtuals: vs, hop_limit: h, edges }
}
