//! Graph representations, generators and the edge-list file format.

mod gen;
mod io;

pub use gen::{
    cycle_graph, gen_digraph, gen_graph, path_graph, plant_negative_cycle, reweight_with_potential, star_graph,
    GraphKind,
};
pub(crate) use io::is_skippable;
pub use io::{load_graph, parse_edge_line, parse_graph, parse_header, AnyGraph, GraphMode, Header};

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::distance::{VertexId, Weight};
use crate::error::{GraphError, ParseErrorKind};

/// An undirected edge, or an arc `u -> v` in a [`DirectedGraph`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub w: Weight,
}

impl Edge {
    pub fn new(u: VertexId, v: VertexId, w: Weight) -> Self {
        Edge { u, v, w }
    }
}

/// One adjacency entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Neighbor {
    pub id: VertexId,
    pub weight: Weight,
}

/// Weighted undirected simple graph with nonnegative integer weights.
///
/// Adjacency lists are sorted by neighbor id, so a neighbor's position in the
/// list (its *port*) is stable and can be found by binary search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndirectedGraph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<Neighbor>>,
}

impl UndirectedGraph {
    /// Validates and builds a graph. Rejects self-loops, duplicate edges,
    /// out-of-range endpoints and negative weights.
    pub fn from_edges(n: usize, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let mut seen = HashSet::with_capacity(edges.len());
        for e in &edges {
            check_edge(n, e).map_err(GraphError::Invalid)?;
            if e.w < 0 {
                return Err(GraphError::Invalid(ParseErrorKind::NegativeWeight(e.w)));
            }
            if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                return Err(GraphError::Invalid(ParseErrorKind::Duplicate(e.u, e.v)));
            }
        }
        Ok(Self::build(n, edges))
    }

    fn build(n: usize, edges: Vec<Edge>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for e in &edges {
            adj[e.u].push(Neighbor { id: e.v, weight: e.w });
            adj[e.v].push(Neighbor { id: e.u, weight: e.w });
        }
        for list in &mut adj {
            list.sort_unstable_by_key(|nb| nb.id);
        }
        UndirectedGraph { n, edges, adj }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: VertexId) -> &[Neighbor] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    /// Position of `u` in `v`'s adjacency list.
    pub fn port_of(&self, v: VertexId, u: VertexId) -> Option<usize> {
        self.adj[v].binary_search_by_key(&u, |nb| nb.id).ok()
    }

    pub fn weight(&self, u: VertexId, v: VertexId) -> Option<Weight> {
        self.port_of(u, v).map(|p| self.adj[u][p].weight)
    }

    /// Renders the graph in the edge-list file format.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.m());
        for e in &self.edges {
            out.push_str(&format!("{} {} {}\n", e.u, e.v, e.w));
        }
        out
    }
}

/// Weighted digraph with signed integer weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedGraph {
    n: usize,
    arcs: Vec<Edge>,
    out: Vec<Vec<Neighbor>>,
}

impl DirectedGraph {
    /// Validates and builds a digraph. Rejects self-loops, duplicate arcs and
    /// out-of-range endpoints; negative weights are allowed.
    pub fn from_arcs(n: usize, arcs: Vec<Edge>) -> Result<Self, GraphError> {
        let mut seen = HashSet::with_capacity(arcs.len());
        for a in &arcs {
            check_edge(n, a).map_err(GraphError::Invalid)?;
            if !seen.insert((a.u, a.v)) {
                return Err(GraphError::Invalid(ParseErrorKind::Duplicate(a.u, a.v)));
            }
        }
        let mut out = vec![Vec::new(); n];
        for a in &arcs {
            out[a.u].push(Neighbor { id: a.v, weight: a.w });
        }
        for list in &mut out {
            list.sort_unstable_by_key(|nb| nb.id);
        }
        Ok(DirectedGraph { n, arcs, out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Edge] {
        &self.arcs
    }

    pub fn out_neighbors(&self, v: VertexId) -> &[Neighbor] {
        &self.out[v]
    }

    pub fn weight(&self, u: VertexId, v: VertexId) -> Option<Weight> {
        let list = &self.out[u];
        list.binary_search_by_key(&v, |nb| nb.id).ok().map(|p| list[p].weight)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {} directed\n", self.n, self.m());
        for a in &self.arcs {
            out.push_str(&format!("{} {} {}\n", a.u, a.v, a.w));
        }
        out
    }
}

fn check_edge(n: usize, e: &Edge) -> Result<(), ParseErrorKind> {
    for x in [e.u, e.v] {
        if x >= n {
            return Err(ParseErrorKind::VertexRange(x as u64));
        }
    }
    if e.u == e.v {
        return Err(ParseErrorKind::SelfLoop(e.u));
    }
    Ok(())
}

/// Exact hop-diameter by BFS from every vertex; `None` if disconnected.
pub fn hop_diameter(g: &UndirectedGraph) -> Option<usize> {
    let mut best = 0;
    for s in 0..g.n() {
        let depth = bfs_depths(g, s);
        for d in depth {
            best = best.max(d?);
        }
    }
    Some(best)
}

/// Hop distances from `s`; `None` for unreachable vertices.
pub fn bfs_depths(g: &UndirectedGraph, s: VertexId) -> Vec<Option<usize>> {
    let mut depth = vec![None; g.n()];
    let mut queue = std::collections::VecDeque::new();
    depth[s] = Some(0);
    queue.push_back(s);
    while let Some(v) = queue.pop_front() {
        let d = depth[v].unwrap();
        for nb in g.neighbors(v) {
            if depth[nb.id].is_none() {
                depth[nb.id] = Some(d + 1);
                queue.push_back(nb.id);
            }
        }
    }
    depth
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_edges() {
        assert!(UndirectedGraph::from_edges(3, vec![Edge::new(1, 1, 1)]).is_err());
        assert!(UndirectedGraph::from_edges(3, vec![Edge::new(0, 3, 1)]).is_err());
        assert!(UndirectedGraph::from_edges(3, vec![Edge::new(0, 1, -1)]).is_err());
        let dup = vec![Edge::new(0, 1, 1), Edge::new(1, 0, 2)];
        assert!(UndirectedGraph::from_edges(3, dup).is_err());
        let arcs = vec![Edge::new(0, 1, -1), Edge::new(1, 0, 2)];
        assert!(DirectedGraph::from_arcs(2, arcs).is_ok());
    }

    #[test]
    fn adjacency_is_sorted_and_symmetric() {
        let g =
            UndirectedGraph::from_edges(4, vec![Edge::new(3, 0, 1), Edge::new(0, 1, 2), Edge::new(2, 0, 3)]).unwrap();
        let ids: Vec<_> = g.neighbors(0).iter().map(|nb| nb.id).collect();
        assert_eq!(ids, vec![1, 2, 3]);
        assert_eq!(g.weight(3, 0), Some(1));
        assert_eq!(g.port_of(0, 2), Some(1));
        assert_eq!(g.weight(1, 2), None);
    }

    #[test]
    fn hop_diameters() {
        assert_eq!(hop_diameter(&path_graph(5, 1)), Some(4));
        assert_eq!(hop_diameter(&cycle_graph(6, 1)), Some(3));
        assert_eq!(hop_diameter(&star_graph(10, 1)), Some(2));
        let disconnected = UndirectedGraph::from_edges(3, vec![Edge::new(0, 1, 1)]).unwrap();
        assert_eq!(hop_diameter(&disconnected), None);
    }
}
