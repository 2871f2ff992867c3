//! Centralized hop-limited Bellman-Ford under the tie-break order.
//!
//! For one origin `x`, level `i` holds at every vertex `v` the best path from
//! `v` to `x` with at most `i` edges, where paths are compared by (distance,
//! hop count, vertex-id sequence read from `v` outward). Such a path is
//! `v` followed by the best `(i-1)`-level path of its first hop, so level `i`
//! is computed from level `i-1` alone and comparisons within one origin reduce
//! to (length, first-hop id). Comparing paths to different origins walks both
//! paths through the recorded history.

use std::cmp::Ordering;

use crate::distance::{PathLen, VertexId};
use crate::graph::UndirectedGraph;
use crate::tuple::{DistTuple, KNearestSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Change {
    level: u32,
    len: PathLen,
    pred: VertexId,
}

/// Full level history of a hop-limited Bellman-Ford from one origin.
#[derive(Clone, Debug)]
pub struct OriginHistory {
    origin: VertexId,
    /// Per vertex, the levels at which its best path changed, ascending.
    changes: Vec<Vec<Change>>,
    /// Last level at which anything changed; later levels repeat it.
    stable_from: u32,
}

impl OriginHistory {
    /// Runs levels `0..=max_level`, stopping early at a fixpoint.
    pub fn run(g: &UndirectedGraph, origin: VertexId, max_level: usize) -> Self {
        let n = g.n();
        let mut changes: Vec<Vec<Change>> = vec![Vec::new(); n];
        let mut cur: Vec<Option<(PathLen, VertexId)>> = vec![None; n];
        cur[origin] = Some((PathLen::ZERO, origin));
        changes[origin].push(Change { level: 0, len: PathLen::ZERO, pred: origin });
        let mut frontier = vec![origin];
        let mut in_cand = vec![false; n];
        let mut stable_from = 0;
        for level in 1..=max_level as u32 {
            let mut cand = Vec::new();
            for &u in &frontier {
                for nb in g.neighbors(u) {
                    if !in_cand[nb.id] && nb.id != origin {
                        in_cand[nb.id] = true;
                        cand.push(nb.id);
                    }
                }
            }
            let mut updates = Vec::new();
            for &v in &cand {
                in_cand[v] = false;
                let mut best: Option<(PathLen, VertexId)> = None;
                for nb in g.neighbors(v) {
                    if let Some((len, _)) = cur[nb.id] {
                        let c = (len.step(nb.weight), nb.id);
                        if best.map_or(true, |b| c < b) {
                            best = Some(c);
                        }
                    }
                }
                if best != cur[v] {
                    updates.push((v, best.expect("candidate has a reached neighbor")));
                }
            }
            if updates.is_empty() {
                break;
            }
            frontier.clear();
            for (v, (len, pred)) in updates {
                cur[v] = Some((len, pred));
                changes[v].push(Change { level, len, pred });
                frontier.push(v);
            }
            stable_from = level;
        }
        OriginHistory { origin, changes, stable_from }
    }

    pub fn origin(&self) -> VertexId {
        self.origin
    }

    /// Level after which nothing changes.
    pub fn stable_from(&self) -> usize {
        self.stable_from as usize
    }

    fn state(&self, v: VertexId, level: usize) -> Option<&Change> {
        let list = &self.changes[v];
        let idx = list.partition_point(|c| c.level as usize <= level);
        idx.checked_sub(1).map(|i| &list[i])
    }

    /// Length of the best `level`-limited path from `v` to the origin.
    pub fn len_at(&self, v: VertexId, level: usize) -> Option<PathLen> {
        self.state(v, level).map(|c| c.len)
    }

    /// The record `v` holds for this origin at `level`.
    pub fn tuple_at(&self, v: VertexId, level: usize) -> Option<DistTuple> {
        self.state(v, level).map(|c| DistTuple {
            origin: self.origin,
            dist: c.len.dist,
            hops: c.len.hops,
            pred: c.pred,
        })
    }

    /// The best `level`-limited path as a vertex sequence from `v` to the
    /// origin.
    pub fn path_at(&self, v: VertexId, level: usize) -> Option<Vec<VertexId>> {
        let first = self.state(v, level)?;
        let mut path = Vec::with_capacity(first.len.hops as usize + 1);
        path.push(v);
        let mut at = v;
        let mut lvl = first.len.hops as usize;
        while lvl > 0 {
            let c = self.state(at, lvl).expect("prefix of a recorded path is recorded");
            debug_assert_eq!(c.len.hops as usize, lvl);
            at = c.pred;
            path.push(at);
            lvl -= 1;
        }
        debug_assert_eq!(at, self.origin);
        Some(path)
    }

    /// Distinct best paths held at `v` over all levels `1..=max_level`, as
    /// (first level, length).
    pub fn distinct_at(&self, v: VertexId) -> impl Iterator<Item = (usize, PathLen)> + '_ {
        self.changes[v].iter().filter(|c| c.level > 0).map(|c| (c.level as usize, c.len))
    }
}

/// Compares the `level`-limited paths held at `v` toward two different
/// origins under `v`'s tie-break order. Both must be reached.
pub fn compare_at(a: &OriginHistory, b: &OriginHistory, v: VertexId, level: usize) -> Ordering {
    let sa = a.state(v, level).expect("reached");
    let sb = b.state(v, level).expect("reached");
    let ord = sa.len.cmp(&sb.len);
    if ord != Ordering::Equal {
        return ord;
    }
    let (mut va, mut vb) = (v, v);
    let mut lvl = sa.len.hops as usize;
    while lvl > 0 {
        let pa = a.state(va, lvl).expect("recorded").pred;
        let pb = b.state(vb, lvl).expect("recorded").pred;
        if pa != pb {
            return pa.cmp(&pb);
        }
        va = pa;
        vb = pb;
        lvl -= 1;
    }
    a.origin.cmp(&b.origin)
}

/// Per-vertex k nearest origins among `sources` over `h`-limited paths,
/// computed centrally. Each set is sorted by the holder's tie-break order.
pub fn limited_bf_oracle(g: &UndirectedGraph, sources: &[VertexId], h: usize, k: usize) -> Vec<KNearestSet> {
    let runs = run_all(g, sources, h);
    select_k(g.n(), &runs, h, k)
}

pub(crate) fn run_all(g: &UndirectedGraph, sources: &[VertexId], h: usize) -> Vec<OriginHistory> {
    let mut srcs = sources.to_vec();
    srcs.sort_unstable();
    srcs.dedup();
    srcs.into_iter().map(|s| OriginHistory::run(g, s, h)).collect()
}

pub(crate) fn select_k(n: usize, runs: &[OriginHistory], level: usize, k: usize) -> Vec<KNearestSet> {
    (0..n)
        .map(|v| {
            let mut reached: Vec<&OriginHistory> = runs.iter().filter(|r| r.state(v, level).is_some()).collect();
            reached.sort_by(|a, b| compare_at(a, b, v, level));
            reached.truncate(k);
            KNearestSet::new(reached.iter().map(|r| r.tuple_at(v, level).unwrap()).collect())
        })
        .collect()
}
