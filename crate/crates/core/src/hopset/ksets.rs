//! Super-round Bellman-Ford computing every vertex's k nearest virtuals.
//!
//! In each super-round every vertex whose list changed in the previous one
//! sends the whole list, in order, to every neighbor; silence means the list
//! is unchanged. A list of `k` records takes `ceil(k / b)` engine rounds.
//! At the end of the super-round the receiver extends every record by the
//! edge it came over and keeps, per origin, the best record by (length,
//! sender id); across origins it orders by (length, sender id, position in
//! the sender's list). Positions are implied by arrival order, so no extra
//! field travels. The result after `i` super-rounds equals the centralized
//! `i`-limited sets.

use crate::distance::{PathLen, VertexId};
use crate::error::SimError;
use crate::graph::UndirectedGraph;
use crate::sim::{run, Envelope, NodeCtx, NodeProgram, Outbox, RoundLedger, DEFAULT_MAX_ROUNDS};
use crate::tuple::{DistTuple, KNearestSet};

type Key = (PathLen, VertexId, u32);

struct KSetNode {
    is_virtual: bool,
    k: usize,
    depth: u32,
    slots: u64,
    set: Vec<DistTuple>,
    /// Whether `set` changed since it was last sent.
    dirty: bool,
    /// Last list received on each port, already extended by the edge.
    cached: Vec<Vec<(Key, DistTuple)>>,
    /// Ports whose list is arriving in the current super-round.
    fresh: Vec<bool>,
    any_fresh: bool,
    super_round: u32,
    history: Option<Vec<Vec<DistTuple>>>,
}

impl KSetNode {
    fn send_slice(&self, ctx: &NodeCtx<'_>, slice: usize, out: &mut Outbox<DistTuple>) {
        if !self.dirty {
            return;
        }
        let lo = (slice * ctx.b).min(self.set.len());
        let hi = ((slice + 1) * ctx.b).min(self.set.len());
        for t in &self.set[lo..hi] {
            out.send_all(ctx.degree(), t);
        }
    }

    fn merge(&mut self, id: VertexId) {
        if self.any_fresh {
            let mut cands: Vec<(Key, DistTuple)> = self.cached.iter().flatten().copied().collect();
            if self.is_virtual {
                cands.push(((PathLen::ZERO, id, 0), DistTuple::own(id)));
            }
            cands.sort_unstable_by_key(|c| (c.1.origin, c.0));
            cands.dedup_by_key(|c| c.1.origin);
            cands.sort_unstable_by_key(|c| c.0);
            cands.truncate(self.k);
            let set: Vec<DistTuple> = cands.into_iter().map(|c| c.1).collect();
            self.dirty = set != self.set;
            self.set = set;
            self.fresh.iter_mut().for_each(|f| *f = false);
            self.any_fresh = false;
        } else {
            self.dirty = false;
        }
        if let Some(h) = &mut self.history {
            h.push(self.set.clone());
        }
    }

    fn done(&self) -> bool {
        self.super_round >= self.depth
    }
}

impl NodeProgram for KSetNode {
    type Msg = DistTuple;

    fn init(&mut self, ctx: &NodeCtx<'_>, out: &mut Outbox<DistTuple>) {
        self.cached = vec![Vec::new(); ctx.degree()];
        self.fresh = vec![false; ctx.degree()];
        if self.is_virtual {
            self.set = vec![DistTuple::own(ctx.id)];
            self.dirty = true;
        }
        if let Some(h) = &mut self.history {
            h.push(self.set.clone());
        }
        if !self.done() {
            self.send_slice(ctx, 0, out);
        }
    }

    fn on_round(&mut self, ctx: &NodeCtx<'_>, round: u64, inbox: &[Envelope<DistTuple>], out: &mut Outbox<DistTuple>) {
        // A neighbor that sends nothing in a super-round still holds the
        // list it sent last; one that sends, sends its whole list.
        for env in inbox {
            let cache = &mut self.cached[env.port];
            if !self.fresh[env.port] {
                self.fresh[env.port] = true;
                self.any_fresh = true;
                cache.clear();
            }
            let pos = cache.len() as u32;
            let t = env.msg;
            let len = t.len().step(ctx.weight(env.port));
            let ext = DistTuple { origin: t.origin, dist: len.dist, hops: len.hops, pred: env.from };
            cache.push(((len, env.from, pos), ext));
        }
        let slot = (round - 1) % self.slots;
        if slot + 1 == self.slots {
            self.merge(ctx.id);
            self.super_round += 1;
            if !self.done() {
                self.send_slice(ctx, 0, out);
            }
        } else {
            self.send_slice(ctx, slot as usize + 1, out);
        }
    }

    fn is_idle(&self) -> bool {
        self.done()
    }
}

/// Runs `depth` super-rounds of the k-set Bellman-Ford from `virtuals`.
/// A virtual vertex's list includes itself at distance 0. Takes exactly
/// `depth * ceil(k / b)` rounds.
pub fn distributed_ksets(
    g: &UndirectedGraph,
    virtuals: &[VertexId],
    k: usize,
    depth: usize,
    b: usize,
) -> Result<(Vec<KNearestSet>, RoundLedger), SimError> {
    let (sets, ledger, _) = ksets_impl(g, virtuals, k, depth, b, false)?;
    Ok((sets, ledger))
}

/// Lists per vertex per super-round.
pub type SetHistory = Vec<Vec<KNearestSet>>;

/// [`distributed_ksets`] also returning every vertex's list after each
/// super-round, indexed `[vertex][super_round]` (index 0 is the initial list).
pub fn distributed_ksets_traced(
    g: &UndirectedGraph,
    virtuals: &[VertexId],
    k: usize,
    depth: usize,
    b: usize,
) -> Result<(Vec<KNearestSet>, RoundLedger, SetHistory), SimError> {
    ksets_impl(g, virtuals, k, depth, b, true)
}

fn ksets_impl(
    g: &UndirectedGraph,
    virtuals: &[VertexId],
    k: usize,
    depth: usize,
    b: usize,
    trace: bool,
) -> Result<(Vec<KNearestSet>, RoundLedger, SetHistory), SimError> {
    assert!(k >= 1, "k must be at least 1");
    let mut is_virtual = vec![false; g.n()];
    for &v in virtuals {
        is_virtual[v] = true;
    }
    let slots = k.div_ceil(b) as u64;
    let res = run(g, b, DEFAULT_MAX_ROUNDS, |v| KSetNode {
        is_virtual: is_virtual[v],
        k,
        depth: depth as u32,
        slots,
        set: Vec::new(),
        dirty: false,
        cached: Vec::new(),
        fresh: Vec::new(),
        any_fresh: false,
        super_round: 0,
        history: trace.then(Vec::new),
    })?;
    let mut sets = Vec::with_capacity(g.n());
    let mut history = Vec::new();
    for s in res.states {
        sets.push(KNearestSet::new(s.set));
        if let Some(h) = s.history {
            history.push(h.into_iter().map(KNearestSet::new).collect());
        }
    }
    Ok((sets, res.ledger, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::Distance;
    use crate::graph::path_graph;

    fn t(origin: VertexId, d: i64, hops: u32, pred: VertexId) -> DistTuple {
        DistTuple { origin, dist: Distance::new(d), hops, pred }
    }

    #[test]
    fn p5_tie_breaks_toward_smaller_path() {
        let g = path_graph(5, 1);
        let (sets, ledger) = distributed_ksets(&g, &[0, 4], 1, 4, 1).unwrap();
        assert_eq!(sets[2].entries, vec![t(0, 2, 2, 1)]);
        assert_eq!(ledger.rounds, 4);
        let (sets, ledger) = distributed_ksets(&g, &[0, 4], 2, 4, 1).unwrap();
        assert_eq!(sets[2].entries, vec![t(0, 2, 2, 1), t(4, 2, 2, 3)]);
        assert_eq!(ledger.rounds, 8);
    }

    #[test]
    fn depth_zero_is_free() {
        let (sets, ledger) = distributed_ksets(&path_graph(3, 1), &[1], 2, 0, 1).unwrap();
        assert_eq!(ledger.rounds, 0);
        assert_eq!(sets[1].entries, vec![DistTuple::own(1)]);
        assert!(sets[0].is_empty());
    }

    #[test]
    fn bandwidth_shortens_super_rounds() {
        let g = path_graph(6, 1);
        let (a, la) = distributed_ksets(&g, &[0, 2, 5], 3, 5, 1).unwrap();
        let (b, lb) = distributed_ksets(&g, &[0, 2, 5], 3, 5, 2).unwrap();
        let (c, lc) = distributed_ksets(&g, &[0, 2, 5], 3, 5, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!((la.rounds, lb.rounds, lc.rounds), (15, 10, 5));
        assert!(lc.peak_edge_load <= 3);
    }
}
