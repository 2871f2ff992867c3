//! Offline checks of the hopset claims, built only from the oracles.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::distance::{PathLen, VertexId};
use crate::error::OracleScaleError;
use crate::graph::{Edge, UndirectedGraph};
use crate::hopset::{distributed_ksets, Hopset};
use crate::oracle::{canonical_paths_oracle, dijkstra, event_a_holds, limited_bf_oracle, limited_distances, run_all};

/// The exact k-shortcut hopset of `g`: every vertex joined to its `k`
/// nearest other vertices, from the definitional sets.
pub fn definitional_hopset(g: &UndirectedGraph, k: usize) -> Hopset {
    let all: Vec<VertexId> = (0..g.n()).collect();
    let sets = limited_bf_oracle(g, &all, g.n().saturating_sub(1), k + 1);
    Hopset::from_sets(k, all, &sets)
}

/// `g` plus the hopset edges. A pair present in both keeps the smaller weight.
pub fn union_with_hopset(g: &UndirectedGraph, hopset: &Hopset) -> UndirectedGraph {
    let mut w: BTreeMap<(VertexId, VertexId), i64> = BTreeMap::new();
    let extra = hopset.edges.iter().map(|e| (e.from, e.to, e.len.dist.finite().expect("finite hopset edge")));
    for (u, v, x) in g.edges().iter().map(|e| (e.u, e.v, e.w)).chain(extra) {
        let key = (u.min(v), u.max(v));
        let slot = w.entry(key).or_insert(x);
        *slot = (*slot).min(x);
    }
    let edges = w.into_iter().map(|((u, v), x)| Edge::new(u, v, x)).collect();
    UndirectedGraph::from_edges(g.n(), edges).expect("union of simple graphs on the same vertices")
}

/// First pair `(u, v)` whose `hops`-limited distance in `union` differs from
/// its distance in `g`.
pub fn hopbound_violation(g: &UndirectedGraph, union: &UndirectedGraph, hops: usize) -> Option<(VertexId, VertexId)> {
    (0..g.n()).find_map(|u| {
        let exact = dijkstra(g, u);
        let limited = limited_distances(union, u, hops);
        (0..g.n()).find(|&v| exact[v] != limited[v]).map(|v| (u, v))
    })
}

/// Whether `ceil(4n/k)` hops in `g` plus its k-shortcut hopset realize every
/// distance of `g`.
pub fn verify_hopbound(g: &UndirectedGraph, k: usize) -> bool {
    let union = union_with_hopset(g, &definitional_hopset(g, k));
    hopbound_violation(g, &union, (4 * g.n()).div_ceil(k)).is_none()
}

/// Which two computations of a virtual's k nearest virtuals disagreed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SetComparison {
    /// Distributed `hk`-limited sets in `G` against `k`-limited sets in `G'`.
    LimitedInGraph,
    /// `k`-limited against unlimited sets in `G'`.
    LimitedInSkeleton,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SetViolation {
    pub vertex: VertexId,
    pub comparison: SetComparison,
    pub left: Vec<(VertexId, PathLen)>,
    pub right: Vec<(VertexId, PathLen)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SetEqualityReport {
    /// False when the sampling event fails; nothing is compared then.
    pub applicable: bool,
    pub checked: usize,
    pub violations: Vec<SetViolation>,
}

/// Compares, for every virtual `v'`, its `k` nearest other virtuals computed
/// three ways: by the distributed k-set run to depth `h k` in `g`, by `k`-hop
/// Bellman-Ford in the skeleton `G'` with hop limit `h`, and by unlimited
/// Bellman-Ford in `G'`. Skeleton paths are ranked by the graph paths they
/// stand for, so all three use the same order. Only meaningful when every
/// canonical path longer than `h` hops has an internal virtual.
pub fn verify_set_equalities(
    g: &UndirectedGraph,
    virtuals: &[VertexId],
    k: usize,
    h: usize,
) -> Result<SetEqualityReport, OracleScaleError> {
    let mut vs = virtuals.to_vec();
    vs.sort_unstable();
    vs.dedup();
    let coll = canonical_paths_oracle(g)?;
    if !event_a_holds(&coll, &vs, h) {
        return Ok(SetEqualityReport { applicable: false, checked: 0, violations: Vec::new() });
    }
    let (sets, _) = distributed_ksets(g, &vs, k + 1, h * k, k + 1).expect("the k-set program throttles itself");
    let skel = SkeletonPaths::new(g, &vs, h);
    let mut violations = Vec::new();
    for (i, &v) in vs.iter().enumerate() {
        let in_graph: Vec<_> = sets[v].iter().filter(|t| t.origin != v).map(|t| (t.origin, t.len())).collect();
        let levels = skel.levels_from(i, k.max(vs.len()));
        let limited = skel.nearest(i, &levels[k.min(levels.len() - 1)], k);
        let unlimited = skel.nearest(i, levels.last().unwrap(), k);
        if in_graph != limited {
            violations.push(SetViolation {
                vertex: v,
                comparison: SetComparison::LimitedInGraph,
                left: in_graph,
                right: limited.clone(),
            });
        }
        if limited != unlimited {
            violations.push(SetViolation {
                vertex: v,
                comparison: SetComparison::LimitedInSkeleton,
                left: limited,
                right: unlimited,
            });
        }
    }
    Ok(SetEqualityReport { applicable: true, checked: vs.len(), violations })
}

/// A skeleton label: total length and the graph path from the source virtual.
type Label = Option<(PathLen, Vec<VertexId>)>;

type Segment = (PathLen, Vec<VertexId>);

/// The skeleton with every edge carrying the graph path it stands for.
struct SkeletonPaths {
    vs: Vec<VertexId>,
    /// `seg[y][x]`: the canonical `h`-limited path from `vs[y]` to `vs[x]`.
    seg: Vec<Vec<Option<Segment>>>,
}

impl SkeletonPaths {
    fn new(g: &UndirectedGraph, vs: &[VertexId], h: usize) -> Self {
        let runs = run_all(g, vs, h);
        let seg = vs
            .iter()
            .enumerate()
            .map(|(y, &vy)| {
                (0..vs.len())
                    .map(|x| {
                        if x == y {
                            return None;
                        }
                        let len = runs[x].len_at(vy, h)?;
                        Some((len, runs[x].path_at(vy, h).expect("reached")))
                    })
                    .collect()
            })
            .collect();
        SkeletonPaths { vs: vs.to_vec(), seg }
    }

    /// Labels after `0..=max` skeleton hops from `src`, stopping early at a
    /// fixpoint (the last entry is then the unlimited answer).
    fn levels_from(&self, src: usize, max: usize) -> Vec<Vec<Label>> {
        let n = self.vs.len();
        let mut cur: Vec<Label> = vec![None; n];
        cur[src] = Some((PathLen::ZERO, vec![self.vs[src]]));
        let mut levels = vec![cur.clone()];
        for _ in 0..max {
            let mut next = cur.clone();
            for (y, label) in cur.iter().enumerate() {
                let Some((len, path)) = label else { continue };
                for (x, seg) in self.seg[y].iter().enumerate() {
                    let Some((slen, spath)) = seg else { continue };
                    let mut p = path.clone();
                    p.extend_from_slice(&spath[1..]);
                    let cand = (len.join(*slen), p);
                    if next[x].as_ref().map_or(true, |cur| cand < *cur) {
                        next[x] = Some(cand);
                    }
                }
            }
            let done = next == cur;
            levels.push(next.clone());
            cur = next;
            if done {
                break;
            }
        }
        levels
    }

    fn nearest(&self, src: usize, labels: &[Label], k: usize) -> Vec<(VertexId, PathLen)> {
        let mut reached: Vec<_> = labels
            .iter()
            .enumerate()
            .filter(|&(x, l)| x != src && l.is_some())
            .map(|(x, l)| (l.as_ref().unwrap(), self.vs[x]))
            .collect();
        reached.sort_by(|a, b| a.0.cmp(b.0));
        reached.into_iter().take(k).map(|(l, x)| (x, l.0)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle_graph, path_graph};

    #[test]
    fn hopbound_small() {
        assert!(verify_hopbound(&cycle_graph(8, 1), 2));
        assert!(verify_hopbound(&path_graph(16, 1), 4));
    }

    #[test]
    fn hopbound_check_is_sensitive() {
        let g = path_graph(16, 1);
        let mut h = definitional_hopset(&g, 4);
        let last = h.edges.iter().rfind(|e| e.from == 0).unwrap().to;
        assert_eq!(last, 4);
        h.edges.retain(|e| !(e.from == 0 && e.to == last) && !(e.from == last && e.to == 0));
        let union = union_with_hopset(&g, &h);
        assert!(hopbound_violation(&g, &union, 3).is_some());
    }

    #[test]
    fn definitional_sets_on_path() {
        let h = definitional_hopset(&path_graph(5, 1), 2);
        let from0: Vec<_> = h.edges.iter().filter(|e| e.from == 0).map(|e| e.to).collect();
        assert_eq!(from0, vec![1, 2]);
    }

    #[test]
    fn set_equalities_on_p5() {
        let g = path_graph(5, 1);
        let r = verify_set_equalities(&g, &[0, 2, 4], 1, 2).unwrap();
        assert!(r.applicable);
        assert_eq!(r.checked, 3);
        assert!(r.violations.is_empty(), "{:?}", r.violations);
        assert!(!verify_set_equalities(&g, &[0, 4], 1, 2).unwrap().applicable);
    }
}
