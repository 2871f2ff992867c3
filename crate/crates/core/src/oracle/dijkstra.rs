use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::distance::{Distance, VertexId};
use crate::graph::{DirectedGraph, Neighbor, UndirectedGraph};

fn dijkstra_with<'a>(n: usize, r: VertexId, adj: impl Fn(VertexId) -> &'a [Neighbor]) -> Vec<Distance> {
    let mut dist = vec![Distance::INFINITY; n];
    let mut heap = BinaryHeap::new();
    dist[r] = Distance::ZERO;
    heap.push(Reverse((Distance::ZERO, r)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for nb in adj(v) {
            let cand = d + nb.weight;
            if cand < dist[nb.id] {
                dist[nb.id] = cand;
                heap.push(Reverse((cand, nb.id)));
            }
        }
    }
    dist
}

/// Exact distances from `r`; unreachable vertices get `INFINITY`.
pub fn dijkstra(g: &UndirectedGraph, r: VertexId) -> Vec<Distance> {
    dijkstra_with(g.n(), r, |v| g.neighbors(v))
}

/// Exact distances from `r` in a digraph with nonnegative weights.
pub fn dijkstra_directed(g: &DirectedGraph, r: VertexId) -> Vec<Distance> {
    debug_assert!(g.arcs().iter().all(|a| a.w >= 0));
    dijkstra_with(g.n(), r, |v| g.out_neighbors(v))
}

/// `(n-1)`-round Bellman-Ford on an undirected graph.
pub fn bellman_ford(g: &UndirectedGraph, r: VertexId) -> Vec<Distance> {
    let mut dist = vec![Distance::INFINITY; g.n()];
    dist[r] = Distance::ZERO;
    for _ in 1..g.n() {
        let prev = dist.clone();
        for e in g.edges() {
            dist[e.v] = dist[e.v].min(prev[e.u] + e.w);
            dist[e.u] = dist[e.u].min(prev[e.v] + e.w);
        }
        if prev == dist {
            break;
        }
    }
    dist
}

/// Bellman-Ford on a digraph with signed weights. `Err(v)` names a vertex
/// whose distance is still decreasing after `n-1` rounds, i.e. one reachable
/// from a negative cycle that is itself reachable from `r`.
pub fn bellman_ford_directed(g: &DirectedGraph, r: VertexId) -> Result<Vec<Distance>, VertexId> {
    let mut dist = vec![Distance::INFINITY; g.n()];
    dist[r] = Distance::ZERO;
    for _ in 1..g.n().max(2) {
        let mut changed = false;
        for a in g.arcs() {
            let cand = dist[a.u] + a.w;
            if cand < dist[a.v] {
                dist[a.v] = cand;
                changed = true;
            }
        }
        if !changed {
            return Ok(dist);
        }
    }
    for a in g.arcs() {
        if dist[a.u] + a.w < dist[a.v] {
            return Err(a.v);
        }
    }
    Ok(dist)
}

/// Distances over paths with at most `h` edges.
pub fn limited_distances(g: &UndirectedGraph, r: VertexId, h: usize) -> Vec<Distance> {
    let mut dist = vec![Distance::INFINITY; g.n()];
    dist[r] = Distance::ZERO;
    for _ in 0..h {
        let prev = dist.clone();
        for e in g.edges() {
            dist[e.v] = dist[e.v].min(prev[e.u] + e.w);
            dist[e.u] = dist[e.u].min(prev[e.v] + e.w);
        }
        if prev == dist {
            break;
        }
    }
    dist
}
