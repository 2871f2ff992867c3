//! Undirected graphs: k-neighborhood graph in one pass, the k-shortcut
//! hopset computed offline from it, then Bellman-Ford passes over the stream
//! plus the resident hopset.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use crate::distance::{Distance, PathLen, VertexId, Weight};
use crate::error::StreamError;
use crate::graph::Edge;
use crate::hopset::Hopset;
use crate::stream::{check_sources, EdgeStream, PassLedger, WordMeter};
use crate::tuple::{DistTuple, KNearestSet};

/// Peak resident words stay below `UNDIRECTED_WORDS_C * n * (k + s)`.
/// Accounting: neighborhood lists (`<= nk`), hopset records with their tree
/// entries (`<= nk`), the search frontier of one k-nearest search
/// (`<= |F| <= nk`), per-source estimates and parents (`2ns`) and one
/// unfolded subgraph with its search state (`<= nk + 4n`).
pub const UNDIRECTED_WORDS_C: u64 = 4;

/// Each vertex's `min(k, deg)` lightest incident edges, ties to the smaller
/// neighbor id. `F` is the union of all of them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighborhoodGraph {
    pub k: usize,
    /// `(neighbor, weight)`, lightest first.
    pub lists: Vec<Vec<(VertexId, Weight)>>,
}

impl NeighborhoodGraph {
    pub fn n(&self) -> usize {
        self.lists.len()
    }

    /// `F` with every edge once, `u < v`, sorted.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out: Vec<Edge> = self
            .lists
            .iter()
            .enumerate()
            .flat_map(|(v, l)| l.iter().map(move |&(u, w)| Edge::new(v.min(u), v.max(u), w)))
            .collect();
        out.sort_unstable_by_key(|e| (e.u, e.v));
        out.dedup_by_key(|e| (e.u, e.v));
        out
    }

    fn adjacency(&self) -> Vec<Vec<(VertexId, Weight)>> {
        let mut adj = vec![Vec::new(); self.n()];
        for e in self.edges() {
            adj[e.u].push((e.v, e.w));
            adj[e.v].push((e.u, e.w));
        }
        adj.iter_mut().for_each(|l| l.sort_unstable());
        adj
    }
}

/// One pass: every vertex keeps its `k` lightest incident edges.
pub fn build_k_neighborhood(
    stream: &mut dyn EdgeStream,
    k: usize,
) -> Result<(NeighborhoodGraph, PassLedger), StreamError> {
    let mut meter = WordMeter::default();
    let (nbhd, passes) = neighborhood_pass(stream, k, &mut meter)?;
    Ok((nbhd, PassLedger { passes, peak_words: meter.peak() }))
}

fn neighborhood_pass(
    stream: &mut dyn EdgeStream,
    k: usize,
    meter: &mut WordMeter,
) -> Result<(NeighborhoodGraph, u64), StreamError> {
    if stream.directed() {
        return Err(StreamError::InvalidInput("k-neighborhood needs an undirected stream".into()));
    }
    if k == 0 {
        return Err(StreamError::InvalidInput("k must be at least 1".into()));
    }
    let before = stream.pass_count();
    let mut lists: Vec<Vec<(VertexId, Weight)>> = vec![Vec::new(); stream.n()];
    let mut offer = |v: VertexId, u: VertexId, w: Weight, meter: &mut WordMeter| {
        let l = &mut lists[v];
        if l.len() == k && (w, u) >= (l[k - 1].1, l[k - 1].0) {
            return;
        }
        let at = l.partition_point(|&(x, xw)| (xw, x) < (w, u));
        l.insert(at, (u, w));
        if l.len() > k {
            l.pop();
        } else {
            meter.alloc(1);
        }
    };
    stream.pass(&mut |e| {
        offer(e.u, e.v, e.w, meter);
        offer(e.v, e.u, e.w, meter);
    })?;
    Ok((NeighborhoodGraph { k, lists }, stream.pass_count() - before))
}

/// The k-shortcut hopset and, per vertex, the shortest-path tree over its
/// `k` nearest vertices that realizes the hopset edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamHopset {
    pub hopset: Hopset,
    /// Per vertex, its nearest vertices in tie-break order (self excluded).
    pub sets: Vec<KNearestSet>,
    /// `trees[v]`: `(u, parent of u toward v, weight of that edge)` for every
    /// `u` in `v`'s set.
    pub trees: Vec<Vec<(VertexId, VertexId, Weight)>>,
}

impl StreamHopset {
    /// The `G`-path from `a` to `b` for a hopset pair, as `(x, y, w)` edges.
    pub fn unfold(&self, a: VertexId, b: VertexId) -> Option<Vec<(VertexId, VertexId, Weight)>> {
        let walk = |owner: VertexId, target: VertexId| {
            let tree = &self.trees[owner];
            let mut out = Vec::new();
            let mut x = target;
            while x != owner {
                let &(_, p, w) = tree.iter().find(|t| t.0 == x)?;
                out.push((p, x, w));
                x = p;
            }
            Some(out)
        };
        walk(a, b).or_else(|| walk(b, a))
    }
}

/// Computes every vertex's `k` nearest vertices inside the neighborhood graph
/// (no passes). Ties between equal distances go to fewer hops, then to the
/// smaller vertex-id sequence read from the searching vertex outward, which
/// is the order the definitional sets use.
pub fn stream_hopset(nbhd: &NeighborhoodGraph, k: usize) -> StreamHopset {
    hopset_metered(nbhd, k, &mut WordMeter::default())
}

type Key = (Distance, u32, Vec<VertexId>);

fn hopset_metered(nbhd: &NeighborhoodGraph, k: usize, meter: &mut WordMeter) -> StreamHopset {
    let n = nbhd.n();
    let adj = nbhd.adjacency();
    let mut sets = Vec::with_capacity(n);
    let mut trees = Vec::with_capacity(n);
    for v in 0..n {
        let mut best: HashMap<VertexId, Key> = HashMap::new();
        let mut heap: BinaryHeap<Reverse<(Key, VertexId)>> = BinaryHeap::new();
        let mut settled: Vec<(VertexId, Key)> = Vec::new();
        let mut frontier_peak = 0;
        heap.push(Reverse(((Distance::ZERO, 0, vec![v]), v)));
        while let Some(Reverse((key, x))) = heap.pop() {
            if settled.iter().any(|s| s.0 == x) || best.get(&x).is_some_and(|b| *b < key) {
                continue;
            }
            settled.push((x, key.clone()));
            if settled.len() == k + 1 {
                break;
            }
            for &(y, w) in &adj[x] {
                if settled.iter().any(|s| s.0 == y) {
                    continue;
                }
                let mut path = key.2.clone();
                path.push(y);
                let cand = (key.0.add_weight(w), key.1 + 1, path);
                if best.get(&y).map_or(true, |b| cand < *b) {
                    best.insert(y, cand.clone());
                    heap.push(Reverse((cand, y)));
                }
            }
            frontier_peak = frontier_peak.max(heap.len());
        }
        meter.alloc(frontier_peak);
        meter.free(frontier_peak);
        let mut entries = Vec::with_capacity(k);
        let mut tree = Vec::with_capacity(k);
        for (u, (d, hops, path)) in settled.into_iter().skip(1) {
            entries.push(DistTuple { origin: u, dist: d, hops, pred: path[1] });
            let p = path[path.len() - 2];
            let w = adj[p].iter().find(|a| a.0 == u).expect("tree edge in the neighborhood graph").1;
            tree.push((u, p, w));
        }
        meter.alloc(entries.len());
        sets.push(KNearestSet::new(entries));
        trees.push(tree);
    }
    let hopset = Hopset::from_sets(k, 0..n, &sets);
    StreamHopset { hopset, sets, trees }
}

/// Distances and shortest-path tree over `G` from one source.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamSpt {
    pub source: VertexId,
    pub dist: Vec<Distance>,
    pub parent: Vec<Option<VertexId>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamResult {
    pub rows: Vec<StreamSpt>,
    pub ledger: PassLedger,
    /// The `k` actually used.
    pub k: usize,
    pub hopset_edges: usize,
    /// Bellman-Ford passes, the neighborhood pass excluded.
    pub bf_passes: u64,
    /// `ceil(4n/k)`.
    pub pass_cap: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

/// Exact single-source shortest paths from `r`.
pub fn stream_sssp(stream: &mut dyn EdgeStream, r: VertexId, k: usize) -> Result<StreamResult, StreamError> {
    stream_multi_source(stream, &[r], k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Via {
    Edge(VertexId, Weight),
    Hop(VertexId),
}

/// Exact shortest paths from every source. `k` below the number of sources is
/// raised to it, and `k` above `n - 1` is lowered.
pub fn stream_multi_source(
    stream: &mut dyn EdgeStream,
    sources: &[VertexId],
    k: usize,
) -> Result<StreamResult, StreamError> {
    let n = stream.n();
    check_sources(n, sources)?;
    if stream.directed() {
        return Err(StreamError::InvalidInput("undirected stream expected".into()));
    }
    if k == 0 {
        return Err(StreamError::InvalidInput("k must be at least 1".into()));
    }
    let s = sources.len();
    let mut note = None;
    let mut k_eff = k;
    if k_eff < s {
        note = Some(format!("k = {k} raised to the number of sources {s}"));
        k_eff = s;
    }
    if k_eff > n.saturating_sub(1) && n > 1 {
        note = Some(format!("k = {k_eff} lowered to n - 1 = {}", n - 1));
        k_eff = n - 1;
    }
    let k_eff = k_eff.max(1);
    let start = stream.pass_count();
    let mut meter = WordMeter::default();

    let (nbhd, _) = neighborhood_pass(stream, k_eff, &mut meter)?;
    let hs = hopset_metered(&nbhd, k_eff, &mut meter);
    let nbhd_words: usize = nbhd.lists.iter().map(Vec::len).sum();
    drop(nbhd);
    meter.free(nbhd_words);

    let mut dist = vec![vec![Distance::INFINITY; n]; s];
    let mut via: Vec<Vec<Option<Via>>> = vec![vec![None; n]; s];
    meter.alloc(2 * n * s);
    for (si, &r) in sources.iter().enumerate() {
        dist[si][r] = Distance::ZERO;
    }
    let cap = (4 * n).div_ceil(k_eff) as u64;
    let mut bf_passes = 0;
    loop {
        let mut changed = false;
        stream.pass(&mut |e| {
            for si in 0..s {
                changed |= relax(&mut dist[si], &mut via[si], e.u, e.v, e.w, Via::Edge(e.u, e.w));
                changed |= relax(&mut dist[si], &mut via[si], e.v, e.u, e.w, Via::Edge(e.v, e.w));
            }
        })?;
        for h in &hs.hopset.edges {
            let w = h.len.dist.finite().expect("finite hopset edge");
            for si in 0..s {
                changed |= relax(&mut dist[si], &mut via[si], h.from, h.to, w, Via::Hop(h.from));
                changed |= relax(&mut dist[si], &mut via[si], h.to, h.from, w, Via::Hop(h.to));
            }
        }
        bf_passes += 1;
        if !changed {
            break;
        }
        if bf_passes > cap {
            return Err(StreamError::NoFixpoint(bf_passes));
        }
        if bf_passes == cap {
            // The hopbound makes cap passes enough; a changing last pass
            // would contradict it, so confirm with one more.
            log::warn!("pass cap {cap} reached with estimates still changing");
        }
    }

    let mut rows = Vec::with_capacity(s);
    for (si, &r) in sources.iter().enumerate() {
        let parent = unfold_tree(n, r, &via[si], &hs, &mut meter);
        rows.push(StreamSpt { source: r, dist: std::mem::take(&mut dist[si]), parent });
    }
    Ok(StreamResult {
        rows,
        ledger: PassLedger { passes: stream.pass_count() - start, peak_words: meter.peak() },
        k: k_eff,
        hopset_edges: hs.hopset.len(),
        bf_passes,
        pass_cap: cap,
        note,
    })
}

fn relax(dist: &mut [Distance], via: &mut [Option<Via>], u: VertexId, v: VertexId, w: Weight, how: Via) -> bool {
    if dist[u].is_infinite() {
        return false;
    }
    let cand = dist[u].add_weight(w);
    if cand < dist[v] {
        dist[v] = cand;
        via[v] = Some(how);
        true
    } else {
        false
    }
}

/// Replaces the hopset edges of one source's tree over `G` plus hopset by
/// their stored paths, then takes a shortest-path tree of that subgraph
/// (fewest hops among equal distances, so zero weights cannot close a loop).
fn unfold_tree(
    n: usize,
    r: VertexId,
    via: &[Option<Via>],
    hs: &StreamHopset,
    meter: &mut WordMeter,
) -> Vec<Option<VertexId>> {
    let mut adj: Vec<Vec<(VertexId, Weight)>> = vec![Vec::new(); n];
    let mut words = 0;
    let mut add = |x: VertexId, y: VertexId, w: Weight, adj: &mut Vec<Vec<(VertexId, Weight)>>| {
        if !adj[x].iter().any(|a| a.0 == y) {
            adj[x].push((y, w));
            adj[y].push((x, w));
            words += 1;
        }
    };
    for (v, how) in via.iter().enumerate() {
        match *how {
            None => {}
            Some(Via::Edge(u, w)) => add(u, v, w, &mut adj),
            Some(Via::Hop(u)) => {
                for (x, y, w) in hs.unfold(u, v).expect("hopset pair has a stored path") {
                    add(x, y, w, &mut adj);
                }
            }
        }
    }
    meter.alloc(words + 4 * n);
    let mut best = vec![PathLen::INFINITY; n];
    let mut parent = vec![None; n];
    let mut heap = BinaryHeap::new();
    best[r] = PathLen::ZERO;
    heap.push(Reverse((PathLen::ZERO, r)));
    while let Some(Reverse((len, x))) = heap.pop() {
        if len > best[x] {
            continue;
        }
        for &(y, w) in &adj[x] {
            let cand = len.step(w);
            if cand < best[y] {
                best[y] = cand;
                parent[y] = Some(x);
                heap.push(Reverse((cand, y)));
            }
        }
    }
    meter.free(words + 4 * n);
    parent
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle_graph, path_graph, UndirectedGraph};
    use crate::oracle::dijkstra;
    use crate::sssp::check_spt;
    use crate::stream::MemoryStream;

    fn t3() -> UndirectedGraph {
        UndirectedGraph::parse("3 3\n0 1 1\n1 2 1\n0 2 3").unwrap()
    }

    #[test]
    fn t3_neighborhood() {
        let (nb, ledger) = build_k_neighborhood(&mut MemoryStream::undirected(&t3()), 1).unwrap();
        assert_eq!(nb.lists, vec![vec![(1, 1)], vec![(0, 1)], vec![(1, 1)]]);
        assert_eq!(nb.edges(), vec![Edge::new(0, 1, 1), Edge::new(1, 2, 1)]);
        assert_eq!(ledger.passes, 1);
    }

    #[test]
    fn p5_neighborhood_is_p5() {
        let g = path_graph(5, 1);
        let (nb, _) = build_k_neighborhood(&mut MemoryStream::undirected(&g), 2).unwrap();
        assert_eq!(nb.edges(), g.edges());
    }

    #[test]
    fn hopset_examples() {
        let (nb, _) = build_k_neighborhood(&mut MemoryStream::undirected(&path_graph(5, 1)), 2).unwrap();
        let hs = stream_hopset(&nb, 2);
        assert_eq!(hs.sets[0].origins().collect::<Vec<_>>(), vec![1, 2]);
        assert!(hs.hopset.edges.iter().any(|e| e.from == 0 && e.to == 2 && e.len.dist == Distance::new(2)));

        let (nb, _) = build_k_neighborhood(&mut MemoryStream::undirected(&t3()), 2).unwrap();
        let hs = stream_hopset(&nb, 2);
        let s0 = &hs.sets[0];
        assert_eq!(s0.origins().collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(s0.get(2).unwrap().dist, Distance::new(2));
        assert_eq!(hs.unfold(0, 2).unwrap(), vec![(1, 2, 1), (0, 1, 1)]);
    }

    #[test]
    fn p5_sssp() {
        let g = path_graph(5, 1);
        let r = stream_sssp(&mut MemoryStream::undirected(&g), 0, 2).unwrap();
        assert_eq!(r.rows[0].dist, dijkstra(&g, 0));
        assert!(r.ledger.passes <= 1 + 10);
        assert_eq!(r.ledger.passes, 1 + r.bf_passes);
    }

    #[test]
    fn c6_tree_uses_graph_edges() {
        let g = cycle_graph(6, 1);
        let r = stream_sssp(&mut MemoryStream::undirected(&g), 0, 3).unwrap();
        let row = &r.rows[0];
        assert_eq!(row.dist, dijkstra(&g, 0));
        check_spt(0, &row.dist, &row.parent, |u, v| g.weight(u, v)).unwrap();
    }

    #[test]
    fn multi_source_raises_k() {
        let g = path_graph(5, 1);
        let r = stream_multi_source(&mut MemoryStream::undirected(&g), &[0, 2, 4], 1).unwrap();
        assert_eq!(r.k, 3);
        assert!(r.note.is_some());
        for row in &r.rows {
            assert_eq!(row.dist, dijkstra(&g, row.source));
        }
    }
}
