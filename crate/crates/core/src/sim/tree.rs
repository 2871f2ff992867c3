//! Upcast, pipelined broadcast and convergecast over a BFS tree.

use std::collections::VecDeque;

use crate::distance::VertexId;
use crate::error::SimError;
use crate::graph::UndirectedGraph;
use crate::sim::bfs::BfsTree;
use crate::sim::engine::{run, Envelope, NodeCtx, NodeProgram, Outbox};
use crate::sim::{RoundLedger, DEFAULT_MAX_ROUNDS};

struct UpNode<M> {
    parent_port: Option<usize>,
    queue: VecDeque<M>,
    collected: Vec<M>,
    trace: bool,
    /// Cumulative words held (own plus received) after each round.
    have_log: Vec<u32>,
    /// Cumulative words delivered to the parent after each round.
    sent_log: Vec<u32>,
    have: u32,
    sent: u32,
    pending: u32,
}

impl<M: Clone> UpNode<M> {
    fn send_batch(&mut self, b: usize, out: &mut Outbox<M>) {
        let Some(port) = self.parent_port else { return };
        let k = self.queue.len().min(b);
        for msg in self.queue.drain(..k) {
            out.send(port, msg);
        }
        self.pending = k as u32;
    }
}

impl<M: Clone> NodeProgram for UpNode<M> {
    type Msg = M;

    fn init(&mut self, ctx: &NodeCtx<'_>, out: &mut Outbox<M>) {
        if self.parent_port.is_none() {
            self.collected.extend(self.queue.drain(..));
        }
        self.send_batch(ctx.b, out);
    }

    fn on_round(&mut self, ctx: &NodeCtx<'_>, _round: u64, inbox: &[Envelope<M>], out: &mut Outbox<M>) {
        self.sent += std::mem::take(&mut self.pending);
        self.have += inbox.len() as u32;
        for env in inbox {
            if self.parent_port.is_none() {
                self.collected.push(env.msg.clone());
            } else {
                self.queue.push_back(env.msg.clone());
            }
        }
        if self.trace {
            self.have_log.push(self.have);
            self.sent_log.push(self.sent);
        }
        self.send_batch(ctx.b, out);
    }

    fn is_idle(&self) -> bool {
        self.queue.is_empty()
    }
}

/// Per-round counters of an upcast run, indexed `[vertex][round - 1]`.
#[derive(Clone, Debug)]
pub struct UpcastTrace {
    /// Words a vertex has held so far: its own plus all received.
    pub have: Vec<Vec<u32>>,
    /// Words a vertex has delivered to its parent so far.
    pub sent: Vec<Vec<u32>>,
    /// Words originating in each vertex's subtree.
    pub subtree: Vec<u32>,
}

fn parent_ports(g: &UndirectedGraph, tree: &BfsTree) -> Vec<Option<usize>> {
    (0..g.n()).map(|v| tree.parent[v].map(|p| g.port_of(v, p).expect("tree edge is a graph edge"))).collect()
}

/// Collects every word of `placements` at the tree root. Each vertex forwards
/// up to `b` queued words per round in FIFO order. Completes within
/// `D_rt + ceil(m / b)` rounds.
pub fn upcast<M: Clone>(
    g: &UndirectedGraph,
    tree: &BfsTree,
    placements: Vec<Vec<M>>,
    b: usize,
) -> Result<(Vec<M>, RoundLedger), SimError> {
    let (c, l, _) = upcast_impl(g, tree, placements, b, false)?;
    Ok((c, l))
}

/// [`upcast`] with per-round instrumentation.
pub fn upcast_traced<M: Clone>(
    g: &UndirectedGraph,
    tree: &BfsTree,
    placements: Vec<Vec<M>>,
    b: usize,
) -> Result<(Vec<M>, RoundLedger, UpcastTrace), SimError> {
    upcast_impl(g, tree, placements, b, true)
}

fn upcast_impl<M: Clone>(
    g: &UndirectedGraph,
    tree: &BfsTree,
    placements: Vec<Vec<M>>,
    b: usize,
    trace: bool,
) -> Result<(Vec<M>, RoundLedger, UpcastTrace), SimError> {
    assert_eq!(placements.len(), g.n());
    let own: Vec<u32> = placements.iter().map(|p| p.len() as u32).collect();
    let ports = parent_ports(g, tree);
    let mut placements: Vec<Option<Vec<M>>> = placements.into_iter().map(Some).collect();
    let res = run(g, b, DEFAULT_MAX_ROUNDS, |v| {
        let q: VecDeque<M> = placements[v].take().unwrap().into();
        UpNode {
            parent_port: ports[v],
            have: q.len() as u32,
            queue: q,
            collected: Vec::new(),
            trace,
            have_log: Vec::new(),
            sent_log: Vec::new(),
            sent: 0,
            pending: 0,
        }
    })?;
    let mut subtree = own;
    let mut order: Vec<VertexId> = (0..g.n()).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(tree.depth[v]));
    for v in order {
        if let Some(p) = tree.parent[v] {
            subtree[p] += subtree[v];
        }
    }
    let mut states = res.states;
    let collected = std::mem::take(&mut states[tree.root].collected);
    let t = UpcastTrace {
        have: states.iter_mut().map(|s| std::mem::take(&mut s.have_log)).collect(),
        sent: states.iter_mut().map(|s| std::mem::take(&mut s.sent_log)).collect(),
        subtree,
    };
    Ok((collected, res.ledger, t))
}

struct DownNode<M, K> {
    child_ports: Vec<usize>,
    queue: VecDeque<M>,
    kept: Vec<M>,
    keep: K,
}

impl<M: Clone, K: Fn(&M) -> bool> DownNode<M, K> {
    fn send_batch(&mut self, b: usize, out: &mut Outbox<M>) {
        if self.child_ports.is_empty() {
            self.queue.clear();
            return;
        }
        let k = self.queue.len().min(b);
        for msg in self.queue.drain(..k) {
            for &p in &self.child_ports {
                out.send(p, msg.clone());
            }
        }
    }
}

impl<M: Clone, K: Fn(&M) -> bool> NodeProgram for DownNode<M, K> {
    type Msg = M;

    fn init(&mut self, ctx: &NodeCtx<'_>, out: &mut Outbox<M>) {
        self.send_batch(ctx.b, out);
    }

    fn on_round(&mut self, ctx: &NodeCtx<'_>, _round: u64, inbox: &[Envelope<M>], out: &mut Outbox<M>) {
        for env in inbox {
            if (self.keep)(&env.msg) {
                self.kept.push(env.msg.clone());
            }
            self.queue.push_back(env.msg.clone());
        }
        self.send_batch(ctx.b, out);
    }

    fn is_idle(&self) -> bool {
        self.queue.is_empty()
    }
}

/// Streams `messages` from the root down the tree, `b` words per round per
/// tree edge. Returns every vertex's copy (the root's included) and the
/// ledger. Completes within `D_rt + ceil(m / b)` rounds.
pub fn pipelined_broadcast<M: Clone>(
    g: &UndirectedGraph,
    tree: &BfsTree,
    messages: Vec<M>,
    b: usize,
) -> Result<(Vec<Vec<M>>, RoundLedger), SimError> {
    pipelined_broadcast_filtered(g, tree, messages, b, |_, _| true)
}

/// [`pipelined_broadcast`] where vertex `v` stores only the words for which
/// `keep(v, word)` holds. Every word still travels to every vertex.
pub fn pipelined_broadcast_filtered<M: Clone>(
    g: &UndirectedGraph,
    tree: &BfsTree,
    messages: Vec<M>,
    b: usize,
    keep: impl Fn(VertexId, &M) -> bool,
) -> Result<(Vec<Vec<M>>, RoundLedger), SimError> {
    let keep = &keep;
    let root_kept: Vec<M> = messages.iter().filter(|m| keep(tree.root, m)).cloned().collect();
    let mut root_queue = Some(messages);
    let res = run(g, b, DEFAULT_MAX_ROUNDS, |v| DownNode {
        child_ports: tree.children[v].iter().map(|&c| g.port_of(v, c).expect("tree edge")).collect(),
        queue: if v == tree.root { root_queue.take().unwrap().into() } else { VecDeque::new() },
        kept: Vec::new(),
        keep: move |m: &M| keep(v, m),
    })?;
    let mut kept: Vec<Vec<M>> = res.states.into_iter().map(|s| s.kept).collect();
    kept[tree.root] = root_kept;
    Ok((kept, res.ledger))
}

struct AggNode<T, F> {
    parent_port: Option<usize>,
    child_ports: Vec<usize>,
    waiting: usize,
    acc: Option<T>,
    combine: F,
    result: Option<T>,
    broadcast: bool,
    done: bool,
}

#[derive(Clone)]
enum AggMsg<T> {
    Up(T),
    Down(T),
}

impl<T: Clone, F: Fn(T, T) -> T> AggNode<T, F> {
    fn finish_up(&mut self, out: &mut Outbox<AggMsg<T>>) {
        let acc = self.acc.take().unwrap();
        match self.parent_port {
            Some(p) => out.send(p, AggMsg::Up(acc)),
            None => {
                if self.broadcast {
                    for &c in &self.child_ports {
                        out.send(c, AggMsg::Down(acc.clone()));
                    }
                }
                self.result = Some(acc);
                self.done = true;
            }
        }
    }
}

impl<T: Clone, F: Fn(T, T) -> T> NodeProgram for AggNode<T, F> {
    type Msg = AggMsg<T>;

    fn init(&mut self, _ctx: &NodeCtx<'_>, out: &mut Outbox<AggMsg<T>>) {
        if self.waiting == 0 {
            self.finish_up(out);
        }
    }

    fn on_round(
        &mut self,
        _ctx: &NodeCtx<'_>,
        _round: u64,
        inbox: &[Envelope<AggMsg<T>>],
        out: &mut Outbox<AggMsg<T>>,
    ) {
        for env in inbox {
            match &env.msg {
                AggMsg::Up(x) => {
                    let acc = self.acc.take().unwrap();
                    self.acc = Some((self.combine)(acc, x.clone()));
                    self.waiting -= 1;
                    if self.waiting == 0 {
                        self.finish_up(out);
                    }
                }
                AggMsg::Down(x) => {
                    for &c in &self.child_ports {
                        out.send(c, AggMsg::Down(x.clone()));
                    }
                    self.result = Some(x.clone());
                    self.done = true;
                }
            }
        }
    }

    fn is_idle(&self) -> bool {
        self.done || !self.broadcast
    }
}

/// Convergecast of `values` combined with `combine` (one word per tree edge)
/// and, if `broadcast`, the result sent back down so every vertex learns it.
/// Takes `D_rt` rounds, or `2 D_rt` with the broadcast.
pub fn tree_aggregate<T: Clone>(
    g: &UndirectedGraph,
    tree: &BfsTree,
    values: Vec<T>,
    combine: impl Fn(T, T) -> T,
    broadcast: bool,
) -> Result<(T, RoundLedger), SimError> {
    let combine = &combine;
    let ports = parent_ports(g, tree);
    let mut values: Vec<Option<T>> = values.into_iter().map(Some).collect();
    let res = run(g, 1, DEFAULT_MAX_ROUNDS, |v| AggNode {
        parent_port: ports[v],
        child_ports: tree.children[v].iter().map(|&c| g.port_of(v, c).expect("tree edge")).collect(),
        waiting: tree.children[v].len(),
        acc: values[v].take(),
        combine,
        result: None,
        broadcast,
        done: false,
    })?;
    let mut states = res.states;
    let value = states[tree.root].result.take().expect("root finishes");
    Ok((value, res.ledger))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{path_graph, star_graph};
    use crate::sim::build_bfs_tree;

    #[test]
    fn upcast_path_leaf() {
        let g = path_graph(4, 1);
        let (t, _) = build_bfs_tree(&g, 0, 1).unwrap();
        let mut placements = vec![Vec::new(); 4];
        placements[3] = (0..5).collect();
        let (got, ledger) = upcast(&g, &t, placements, 2).unwrap();
        assert_eq!(got, vec![0, 1, 2, 3, 4]);
        assert!(ledger.rounds <= 3 + 3, "rounds {}", ledger.rounds);
    }

    #[test]
    fn upcast_star() {
        let n = 12;
        let g = star_graph(n, 1);
        let (t, _) = build_bfs_tree(&g, 0, 1).unwrap();
        let placements: Vec<Vec<usize>> = (0..n).map(|v| if v == 0 { vec![] } else { vec![v] }).collect();
        let (mut got, ledger) = upcast(&g, &t, placements, 1).unwrap();
        got.sort_unstable();
        assert_eq!(got, (1..n).collect::<Vec<_>>());
        assert!(ledger.rounds <= 1 + (n as u64 - 1));
    }

    #[test]
    fn upcast_nothing() {
        let g = path_graph(4, 1);
        let (t, _) = build_bfs_tree(&g, 0, 1).unwrap();
        let (got, ledger) = upcast::<u8>(&g, &t, vec![Vec::new(); 4], 1).unwrap();
        assert!(got.is_empty());
        assert_eq!(ledger.rounds, 0);
    }

    #[test]
    fn broadcast_path() {
        let g = path_graph(5, 1);
        let (t, _) = build_bfs_tree(&g, 0, 1).unwrap();
        let (held, ledger) = pipelined_broadcast(&g, &t, vec![1, 2, 3], 1).unwrap();
        assert!(held.iter().all(|h| h == &vec![1, 2, 3]));
        assert!(ledger.rounds <= 7);
        let (_, ledger) = pipelined_broadcast(&g, &t, vec![1, 2, 3], 3).unwrap();
        assert!(ledger.rounds <= 4 + 1);
        let (_, ledger) = pipelined_broadcast::<u8>(&g, &t, vec![], 1).unwrap();
        assert_eq!(ledger.rounds, 0);
    }

    #[test]
    fn filtered_broadcast() {
        let g = path_graph(4, 1);
        let (t, _) = build_bfs_tree(&g, 0, 1).unwrap();
        let (held, _) = pipelined_broadcast_filtered(&g, &t, vec![0usize, 1, 2, 3], 1, |v, m| *m == v).unwrap();
        for (v, h) in held.iter().enumerate() {
            assert_eq!(h, &vec![v]);
        }
    }

    #[test]
    fn aggregate_max() {
        let g = path_graph(5, 1);
        let (t, _) = build_bfs_tree(&g, 2, 1).unwrap();
        let (m, ledger) = tree_aggregate(&g, &t, vec![3, 9, 1, 4, 2], std::cmp::max, true).unwrap();
        assert_eq!(m, 9);
        assert_eq!(ledger.rounds, 2 * t.height as u64);
        let (_, ledger) = tree_aggregate(&g, &t, vec![3, 9, 1, 4, 2], std::cmp::max, false).unwrap();
        assert_eq!(ledger.rounds, t.height as u64);
    }
}
