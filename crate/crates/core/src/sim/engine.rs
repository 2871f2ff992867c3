//! Synchronous round engine.
//!
//! In round `t` every vertex's outbox (filled while handling round `t-1`, or
//! by `init` for `t = 1`) is delivered, and then every vertex handles its
//! inbox and fills its next outbox. The run ends when every program is idle
//! and no message is in flight.

use crate::distance::{VertexId, Weight};
use crate::error::SimError;
use crate::graph::{Neighbor, UndirectedGraph};
use crate::sim::RoundLedger;

/// What a vertex may look at: its id, the model parameters and its incident
/// edges.
pub struct NodeCtx<'a> {
    pub id: VertexId,
    pub n: usize,
    pub b: usize,
    pub neighbors: &'a [Neighbor],
}

impl NodeCtx<'_> {
    pub fn degree(&self) -> usize {
        self.neighbors.len()
    }

    /// Port (adjacency position) of neighbor `u`.
    pub fn port_of(&self, u: VertexId) -> Option<usize> {
        self.neighbors.binary_search_by_key(&u, |nb| nb.id).ok()
    }

    pub fn weight(&self, port: usize) -> Weight {
        self.neighbors[port].weight
    }
}

/// A delivered message.
#[derive(Clone, Debug)]
pub struct Envelope<M> {
    pub from: VertexId,
    /// The receiver's port for `from`.
    pub port: usize,
    pub msg: M,
}

/// Messages a vertex sends in the next round, addressed by port.
#[derive(Debug)]
pub struct Outbox<M> {
    msgs: Vec<(usize, M)>,
}

impl<M> Default for Outbox<M> {
    fn default() -> Self {
        Outbox { msgs: Vec::new() }
    }
}

impl<M: Clone> Outbox<M> {
    pub fn send(&mut self, port: usize, msg: M) {
        self.msgs.push((port, msg));
    }

    /// Sends a copy to every neighbor.
    pub fn send_all(&mut self, degree: usize, msg: &M) {
        for p in 0..degree {
            self.msgs.push((p, msg.clone()));
        }
    }

    pub fn is_empty(&self) -> bool {
        self.msgs.is_empty()
    }
}

/// Per-vertex program. Each message is one word of bandwidth.
pub trait NodeProgram {
    type Msg: Clone;

    /// Fills the messages sent in round 1.
    fn init(&mut self, ctx: &NodeCtx<'_>, out: &mut Outbox<Self::Msg>);

    /// Handles everything delivered in `round` and fills the next outbox.
    fn on_round(&mut self, ctx: &NodeCtx<'_>, round: u64, inbox: &[Envelope<Self::Msg>], out: &mut Outbox<Self::Msg>);

    /// True when the program will not send again unless a message arrives.
    fn is_idle(&self) -> bool;
}

/// Final program states and the run's ledger.
#[derive(Debug)]
pub struct RunOutcome<P> {
    pub states: Vec<P>,
    pub ledger: RoundLedger,
}

/// Runs one program per vertex with bandwidth `b` words per edge direction
/// per round. Fails with a bandwidth fault as soon as any outbox exceeds `b`
/// words toward one neighbor, and with a timeout if the run has not
/// quiesced after `max_rounds` rounds.
pub fn run<P, F>(g: &UndirectedGraph, b: usize, max_rounds: u64, mut factory: F) -> Result<RunOutcome<P>, SimError>
where
    P: NodeProgram,
    F: FnMut(VertexId) -> P,
{
    assert!(b >= 1, "bandwidth must be at least 1");
    let n = g.n();
    let ctxs: Vec<NodeCtx<'_>> = (0..n).map(|v| NodeCtx { id: v, n, b, neighbors: g.neighbors(v) }).collect();
    // reverse[v][p] = port of v at its p-th neighbor
    let reverse: Vec<Vec<usize>> = (0..n)
        .map(|v| g.neighbors(v).iter().map(|nb| g.port_of(nb.id, v).expect("symmetric adjacency")).collect())
        .collect();
    let mut states: Vec<P> = (0..n).map(&mut factory).collect();
    let mut outboxes: Vec<Outbox<P::Msg>> = (0..n).map(|_| Outbox::default()).collect();
    for v in 0..n {
        states[v].init(&ctxs[v], &mut outboxes[v]);
    }
    let mut inboxes: Vec<Vec<Envelope<P::Msg>>> = (0..n).map(|_| Vec::new()).collect();
    let max_degree = (0..n).map(|v| g.degree(v)).max().unwrap_or(0);
    let mut load = vec![0usize; max_degree.max(1)];
    let mut ledger = RoundLedger::default();
    loop {
        let in_flight = outboxes.iter().any(|o| !o.is_empty());
        if !in_flight && states.iter().all(|s| s.is_idle()) {
            return Ok(RunOutcome { states, ledger });
        }
        if ledger.rounds >= max_rounds {
            return Err(SimError::Timeout { partial: ledger });
        }
        let round = ledger.rounds + 1;
        for inbox in &mut inboxes {
            inbox.clear();
        }
        let mut round_peak = 0;
        for v in 0..n {
            let out = std::mem::take(&mut outboxes[v].msgs);
            if out.is_empty() {
                continue;
            }
            let deg = g.degree(v);
            load[..deg].iter_mut().for_each(|l| *l = 0);
            for (port, msg) in out {
                assert!(port < deg, "vertex {v} sent on nonexistent port {port}");
                load[port] += 1;
                if load[port] > b {
                    return Err(SimError::Bandwidth {
                        round,
                        from: v,
                        to: g.neighbors(v)[port].id,
                        load: load[port],
                        b,
                    });
                }
                let to = g.neighbors(v)[port].id;
                inboxes[to].push(Envelope { from: v, port: reverse[v][port], msg });
                ledger.messages += 1;
            }
            round_peak = round_peak.max(load[..deg].iter().copied().max().unwrap_or(0));
        }
        ledger.rounds = round;
        ledger.peak_edge_load = ledger.peak_edge_load.max(round_peak as u64);
        for v in 0..n {
            states[v].on_round(&ctxs[v], round, &inboxes[v], &mut outboxes[v]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::path_graph;

    /// Vertex 0 sends a token down the path; each vertex forwards it once.
    struct Echo {
        got: Option<u64>,
        forward: bool,
    }

    impl NodeProgram for Echo {
        type Msg = u32;

        fn init(&mut self, ctx: &NodeCtx<'_>, out: &mut Outbox<u32>) {
            if ctx.id == 0 {
                self.got = Some(0);
                out.send_all(ctx.degree(), &7);
            }
        }

        fn on_round(&mut self, ctx: &NodeCtx<'_>, round: u64, inbox: &[Envelope<u32>], out: &mut Outbox<u32>) {
            if self.got.is_none() && !inbox.is_empty() {
                self.got = Some(round);
                self.forward = true;
            }
            if std::mem::take(&mut self.forward) {
                for p in 0..ctx.degree() {
                    if ctx.neighbors[p].id > ctx.id {
                        out.send(p, 7);
                    }
                }
            }
        }

        fn is_idle(&self) -> bool {
            !self.forward
        }
    }

    #[test]
    fn echo_on_path() {
        let g = path_graph(5, 1);
        let res = run(&g, 1, 100, |_| Echo { got: None, forward: false }).unwrap();
        let got: Vec<_> = res.states.iter().map(|s| s.got.unwrap()).collect();
        assert_eq!(got, vec![0, 1, 2, 3, 4]);
        assert_eq!(res.ledger.rounds, 4);
        assert_eq!(res.ledger.messages, 4);
        assert_eq!(res.ledger.peak_edge_load, 1);
    }

    #[derive(Debug)]
    struct Flood(usize);

    impl NodeProgram for Flood {
        type Msg = ();

        fn init(&mut self, ctx: &NodeCtx<'_>, out: &mut Outbox<()>) {
            if ctx.id == 0 {
                for _ in 0..self.0 {
                    out.send(0, ());
                }
            }
        }

        fn on_round(&mut self, _: &NodeCtx<'_>, _: u64, _: &[Envelope<()>], _: &mut Outbox<()>) {}

        fn is_idle(&self) -> bool {
            true
        }
    }

    #[test]
    fn bandwidth_fault() {
        let g = path_graph(3, 1);
        match run(&g, 2, 10, |_| Flood(3)) {
            Err(SimError::Bandwidth { round: 1, from: 0, to: 1, load: 3, b: 2 }) => {}
            other => panic!("expected bandwidth fault, got {other:?}"),
        }
        assert!(run(&g, 3, 10, |_| Flood(3)).is_ok());
    }

    #[derive(Debug)]
    struct Forever;

    impl NodeProgram for Forever {
        type Msg = ();

        fn init(&mut self, _: &NodeCtx<'_>, _: &mut Outbox<()>) {}

        fn on_round(&mut self, _: &NodeCtx<'_>, _: u64, _: &[Envelope<()>], _: &mut Outbox<()>) {}

        fn is_idle(&self) -> bool {
            false
        }
    }

    #[test]
    fn timeout_reports_partial_ledger() {
        match run(&path_graph(2, 1), 1, 5, |_| Forever) {
            Err(SimError::Timeout { partial }) => assert_eq!(partial.rounds, 5),
            other => panic!("expected timeout, got {other:?}"),
        }
    }
}
