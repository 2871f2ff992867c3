//! Seeded graph generators.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distance::{VertexId, Weight};
use crate::error::GraphError;
use crate::graph::{DirectedGraph, Edge, UndirectedGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GraphKind {
    /// Random spanning tree plus uniformly random extra edges.
    Random,
    Cycle,
    Path,
    /// Vertex 0 is the center.
    Star,
}

impl GraphKind {
    /// Edge count implied by the kind, if it is fixed by `n`.
    pub fn implied_m(self, n: usize) -> Option<usize> {
        match self {
            GraphKind::Random => None,
            GraphKind::Cycle if n >= 3 => Some(n),
            GraphKind::Cycle => Some(n.saturating_sub(1)),
            GraphKind::Path | GraphKind::Star => Some(n.saturating_sub(1)),
        }
    }
}

fn weight(rng: &mut ChaCha8Rng, (lo, hi): (Weight, Weight)) -> Weight {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

fn max_edges(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Generates an undirected graph. The output is a deterministic function of
/// the arguments. For fixed-shape kinds `m` must match the shape's edge count.
pub fn gen_graph(
    kind: GraphKind,
    n: usize,
    m: usize,
    weight_range: (Weight, Weight),
    seed: u64,
) -> Result<UndirectedGraph, GraphError> {
    let (lo, hi) = weight_range;
    if n == 0 {
        return Err(GraphError::InvalidSpec("n must be at least 1".into()));
    }
    if lo < 0 || lo > hi {
        return Err(GraphError::InvalidSpec(format!("bad weight range ({lo}, {hi})")));
    }
    if let Some(expected) = kind.implied_m(n) {
        if m != expected {
            return Err(GraphError::InvalidSpec(format!("{kind:?} on {n} vertices has {expected} edges, not {m}")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(VertexId, VertexId)> = match kind {
        GraphKind::Path => (1..n).map(|i| (i - 1, i)).collect(),
        GraphKind::Cycle => {
            let mut p: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
            if n >= 3 {
                p.push((0, n - 1));
            }
            p
        }
        GraphKind::Star => (1..n).map(|i| (0, i)).collect(),
        GraphKind::Random => random_pairs(&mut rng, n, m)?,
    };
    let edges = pairs.into_iter().map(|(u, v)| Edge::new(u, v, weight(&mut rng, weight_range))).collect();
    UndirectedGraph::from_edges(n, edges)
}

fn random_pairs(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Result<Vec<(VertexId, VertexId)>, GraphError> {
    if m + 1 < n || m > max_edges(n) {
        return Err(GraphError::InfeasibleDensity { n, m });
    }
    let mut order: Vec<VertexId> = (0..n).collect();
    order.shuffle(rng);
    let mut pairs = Vec::with_capacity(m);
    let mut seen = HashSet::with_capacity(m);
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let (a, b) = (order[i], order[j]);
        seen.insert((a.min(b), a.max(b)));
        pairs.push((a, b));
    }
    if 2 * m > max_edges(n) {
        let mut rest: Vec<_> =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|p| !seen.contains(p)).collect();
        rest.shuffle(rng);
        pairs.extend(rest.into_iter().take(m - pairs.len()));
    } else {
        while pairs.len() < m {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if u != v && seen.insert((u.min(v), u.max(v))) {
                pairs.push((u, v));
            }
        }
    }
    Ok(pairs)
}

pub fn path_graph(n: usize, w: Weight) -> UndirectedGraph {
    gen_graph(GraphKind::Path, n, n.saturating_sub(1), (w, w), 0).expect("valid path")
}

pub fn cycle_graph(n: usize, w: Weight) -> UndirectedGraph {
    let m = GraphKind::Cycle.implied_m(n).unwrap();
    gen_graph(GraphKind::Cycle, n, m, (w, w), 0).expect("valid cycle")
}

pub fn star_graph(n: usize, w: Weight) -> UndirectedGraph {
    gen_graph(GraphKind::Star, n, n.saturating_sub(1), (w, w), 0).expect("valid star")
}

/// Random digraph with `m` arcs in which every vertex is reachable from
/// vertex 0 (a random out-arborescence is laid down first).
pub fn gen_digraph(n: usize, m: usize, weight_range: (Weight, Weight), seed: u64) -> Result<DirectedGraph, GraphError> {
    if n == 0 || m + 1 < n || m > n * n.saturating_sub(1) {
        return Err(GraphError::InfeasibleDensity { n, m });
    }
    if weight_range.0 > weight_range.1 {
        return Err(GraphError::InvalidSpec(format!("bad weight range {weight_range:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<VertexId> = (1..n).collect();
    order.shuffle(&mut rng);
    order.insert(0, 0);
    let mut seen = HashSet::with_capacity(m);
    let mut arcs = Vec::with_capacity(m);
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let (u, v) = (order[j], order[i]);
        seen.insert((u, v));
        arcs.push(Edge::new(u, v, weight(&mut rng, weight_range)));
    }
    while arcs.len() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v && seen.insert((u, v)) {
            arcs.push(Edge::new(u, v, weight(&mut rng, weight_range)));
        }
    }
    DirectedGraph::from_arcs(n, arcs)
}

/// Overwrites (or adds) the arcs of a random simple cycle of `len` vertices
/// so that the cycle's total weight is `-deficit`. Returns the new digraph and
/// the cycle's vertex sequence.
pub fn plant_negative_cycle(
    g: &DirectedGraph,
    len: usize,
    deficit: Weight,
    seed: u64,
) -> (DirectedGraph, Vec<VertexId>) {
    assert!(len >= 2 && len <= g.n(), "cycle length out of range");
    assert!(deficit >= 1, "deficit must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vs: Vec<VertexId> = (0..g.n()).collect();
    vs.shuffle(&mut rng);
    vs.truncate(len);
    let mut planted: Vec<Edge> = Vec::with_capacity(len);
    let mut total = 0;
    for i in 0..len - 1 {
        let w = rng.gen_range(0..=10);
        total += w;
        planted.push(Edge::new(vs[i], vs[i + 1], w));
    }
    planted.push(Edge::new(vs[len - 1], vs[0], -total - deficit));
    let replaced: HashSet<_> = planted.iter().map(|e| (e.u, e.v)).collect();
    let mut arcs: Vec<Edge> = g.arcs().iter().copied().filter(|a| !replaced.contains(&(a.u, a.v))).collect();
    arcs.extend(planted);
    (DirectedGraph::from_arcs(g.n(), arcs).expect("valid arcs"), vs)
}

/// Applies `w'(u,v) = w(u,v) + p(u) - p(v)` with the given potential. Cycle
/// weights are unchanged, so a nonnegative digraph keeps no negative cycle
/// while gaining negative arcs; `d'(s,v) = d(s,v) + p(s) - p(v)`.
pub fn reweight_with_potential(g: &DirectedGraph, potential: &[Weight]) -> DirectedGraph {
    let arcs = g.arcs().iter().map(|a| Edge::new(a.u, a.v, a.w + potential[a.u] - potential[a.v])).collect();
    DirectedGraph::from_arcs(g.n(), arcs).expect("valid arcs")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::bfs_depths;

    #[test]
    fn fixed_shapes() {
        let c6 = cycle_graph(6, 1);
        assert_eq!(c6.m(), 6);
        assert!(c6.edges().iter().all(|e| e.w == 1));
        assert_eq!(c6.weight(0, 5), Some(1));
        let p5 = path_graph(5, 1);
        assert_eq!(p5.m(), 4);
        assert_eq!(p5.weight(3, 4), Some(1));
        let s = star_graph(10, 1);
        assert_eq!(s.degree(0), 9);
        assert!(gen_graph(GraphKind::Path, 5, 7, (1, 1), 0).is_err());
    }

    #[test]
    fn random_is_deterministic_and_connected() {
        let a = gen_graph(GraphKind::Random, 64, 256, (1, 100), 7).unwrap();
        let b = gen_graph(GraphKind::Random, 64, 256, (1, 100), 7).unwrap();
        assert_eq!(a.to_edge_list(), b.to_edge_list());
        assert_eq!(a.m(), 256);
        assert!(bfs_depths(&a, 0).iter().all(Option::is_some));
        let c = gen_graph(GraphKind::Random, 64, 256, (1, 100), 8).unwrap();
        assert_ne!(a.to_edge_list(), c.to_edge_list());
    }

    #[test]
    fn random_density_limits() {
        assert!(matches!(gen_graph(GraphKind::Random, 10, 8, (1, 1), 0), Err(GraphError::InfeasibleDensity { .. })));
        assert!(gen_graph(GraphKind::Random, 10, 46, (1, 1), 0).is_err());
        let complete = gen_graph(GraphKind::Random, 10, 45, (0, 3), 1).unwrap();
        assert_eq!(complete.m(), 45);
    }

    #[test]
    fn planted_cycle_is_negative() {
        let g = gen_digraph(20, 60, (0, 10), 3).unwrap();
        let (h, cyc) = plant_negative_cycle(&g, 4, 1, 9);
        let total: Weight = (0..cyc.len()).map(|i| h.weight(cyc[i], cyc[(i + 1) % cyc.len()]).unwrap()).sum();
        assert_eq!(total, -1);
    }
}
