//! Depth-limited Bellman-Ford from the virtual vertices carrying one label
//! per source. Used for the in-graph part of every skeleton iteration and
//! for the final sweep.

use serde::{Deserialize, Serialize};

use crate::distance::{Distance, PathLen, VertexId};
use crate::error::SimError;
use crate::graph::UndirectedGraph;
use crate::sim::{run, Envelope, NodeCtx, NodeProgram, Outbox, RoundLedger, DEFAULT_MAX_ROUNDS};

/// A distance estimate with the metadata that orders equal distances.
///
/// Labels compare by distance, then by the hop count of the path realizing
/// it, then by the iteration in which the supplying virtual acquired its
/// value, sweep hops, supplying virtual id and neighbor id. The hop count
/// makes every parent strictly smaller than its child, so parent pointers
/// cannot form a cycle even when edges weigh 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Label {
    pub dist: Distance,
    pub hops: u32,
    pub acquired: u32,
    pub sweep_hops: u32,
    /// The virtual whose estimate this label extends.
    pub via: VertexId,
    /// The neighbor it arrived from; the holder itself for a virtual's own value.
    pub from: VertexId,
}

impl Label {
    /// A virtual's own value.
    pub fn own(v: VertexId, len: PathLen, acquired: u32) -> Self {
        Label { dist: len.dist, hops: len.hops, acquired, sweep_hops: 0, via: v, from: v }
    }

    pub fn len(&self) -> PathLen {
        PathLen::new(self.dist, self.hops)
    }

    fn extend(self, w: i64, sender: VertexId) -> Self {
        Label {
            dist: self.dist.add_weight(w),
            hops: self.hops + 1,
            sweep_hops: self.sweep_hops + 1,
            from: sender,
            ..self
        }
    }
}

/// What one vertex ends up with for one source.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub(crate) struct Slot {
    pub own: Option<Label>,
    pub best: Option<Label>,
}

impl Slot {
    pub fn current(&self) -> Option<Label> {
        match (self.own, self.best) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    /// The neighbor realizing the current value, if one does.
    pub fn parent(&self) -> Option<VertexId> {
        let cur = self.current()?;
        self.best.filter(|b| b.len() == cur.len()).map(|b| b.from)
    }
}

type Msg = (u32, Label);

struct BfNode {
    slots: Vec<Slot>,
    sent: Vec<Option<Label>>,
    outgoing: Vec<Msg>,
    received: Vec<Msg>,
    step: u32,
    depth: u32,
    rounds_per_step: u64,
}

impl BfNode {
    fn collect_changes(&mut self) {
        self.outgoing.clear();
        for (i, slot) in self.slots.iter().enumerate() {
            let cur = slot.current();
            if let Some(c) = cur.filter(|_| cur != self.sent[i]) {
                self.sent[i] = cur;
                self.outgoing.push((i as u32, c));
            }
        }
    }

    fn send_slice(&self, ctx: &NodeCtx<'_>, slice: usize, out: &mut Outbox<Msg>) {
        let lo = (slice * ctx.b).min(self.outgoing.len());
        let hi = ((slice + 1) * ctx.b).min(self.outgoing.len());
        for m in &self.outgoing[lo..hi] {
            out.send_all(ctx.degree(), m);
        }
    }
}

impl NodeProgram for BfNode {
    type Msg = Msg;

    fn init(&mut self, ctx: &NodeCtx<'_>, out: &mut Outbox<Msg>) {
        if self.depth > 0 {
            self.collect_changes();
            self.send_slice(ctx, 0, out);
        }
    }

    fn on_round(&mut self, ctx: &NodeCtx<'_>, round: u64, inbox: &[Envelope<Msg>], out: &mut Outbox<Msg>) {
        for env in inbox {
            let (src, label) = env.msg;
            self.received.push((src, label.extend(ctx.weight(env.port), env.from)));
        }
        let slot = (round - 1) % self.rounds_per_step;
        if slot + 1 < self.rounds_per_step {
            self.send_slice(ctx, slot as usize + 1, out);
            return;
        }
        for (src, cand) in self.received.drain(..) {
            let s = &mut self.slots[src as usize];
            if s.best.map_or(true, |b| cand < b) {
                s.best = Some(cand);
            }
        }
        self.step += 1;
        if self.step < self.depth {
            self.collect_changes();
            self.send_slice(ctx, 0, out);
        }
    }

    fn is_idle(&self) -> bool {
        self.step >= self.depth
    }
}

/// Runs `depth` Bellman-Ford steps. `own[v]` holds `v`'s fixed labels, one
/// per source (all `None` for non-virtuals). A step lasts `ceil(s/b)` rounds
/// and a vertex sends only the labels that changed since it last sent them.
pub(crate) fn label_bf(
    g: &UndirectedGraph,
    own: Vec<Vec<Option<Label>>>,
    s: usize,
    depth: usize,
    b: usize,
) -> Result<(Vec<Vec<Slot>>, RoundLedger), SimError> {
    let rounds_per_step = s.div_ceil(b).max(1) as u64;
    let mut own: Vec<Option<Vec<Option<Label>>>> = own.into_iter().map(Some).collect();
    let res = run(g, b, DEFAULT_MAX_ROUNDS, |v| {
        let labels = own[v].take().unwrap();
        debug_assert_eq!(labels.len(), s);
        BfNode {
            slots: labels.into_iter().map(|own| Slot { own, best: None }).collect(),
            sent: vec![None; s],
            outgoing: Vec::new(),
            received: Vec::new(),
            step: 0,
            depth: depth as u32,
            rounds_per_step,
        }
    })?;
    Ok((res.states.into_iter().map(|st| st.slots).collect(), res.ledger))
}

/// A virtual's value handed to [`final_sweep`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VirtualEstimate {
    pub vertex: VertexId,
    pub dist: Distance,
    pub hops: u32,
    pub acquired: u32,
}

/// Per-vertex outcome of the final sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Estimate {
    pub delta: Distance,
    pub hops: u32,
    pub pred: Option<VertexId>,
    pub via_virtual: Option<VertexId>,
    pub phase_acquired: u32,
    pub hop_in_sweep: u32,
}

impl Estimate {
    pub(crate) fn from_slot(slot: &Slot) -> Self {
        match slot.current() {
            None => Estimate {
                delta: Distance::INFINITY,
                hops: 0,
                pred: None,
                via_virtual: None,
                phase_acquired: 0,
                hop_in_sweep: 0,
            },
            Some(l) => Estimate {
                delta: l.dist,
                hops: l.hops,
                pred: slot.parent(),
                via_virtual: Some(l.via),
                phase_acquired: l.acquired,
                hop_in_sweep: l.sweep_hops,
            },
        }
    }
}

/// Single-source sweep: `depth` steps of Bellman-Ford from the virtuals'
/// final values, each vertex forwarding its smallest label.
pub fn final_sweep(
    g: &UndirectedGraph,
    virtual_estimates: &[VirtualEstimate],
    depth: usize,
    b: usize,
) -> Result<(Vec<Estimate>, RoundLedger), SimError> {
    let mut own = vec![vec![None]; g.n()];
    for e in virtual_estimates.iter().filter(|e| e.dist.is_finite()) {
        own[e.vertex][0] = Some(Label::own(e.vertex, PathLen::new(e.dist, e.hops), e.acquired));
    }
    let (slots, ledger) = label_bf(g, own, 1, depth, b)?;
    Ok((slots.iter().map(|s| Estimate::from_slot(&s[0])).collect(), ledger))
}
