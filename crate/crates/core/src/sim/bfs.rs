use serde::{Deserialize, Serialize};

use crate::distance::VertexId;
use crate::error::SimError;
use crate::graph::UndirectedGraph;
use crate::sim::engine::{run, Envelope, NodeCtx, NodeProgram, Outbox};
use crate::sim::{RoundLedger, DEFAULT_MAX_ROUNDS};

/// Rounds the flooding construction spends beyond the tree height: the
/// deepest vertices still announce themselves once after joining.
pub const BFS_EXTRA_ROUNDS: u64 = 1;

/// Breadth-first spanning tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BfsTree {
    pub root: VertexId,
    pub parent: Vec<Option<VertexId>>,
    pub depth: Vec<u32>,
    pub children: Vec<Vec<VertexId>>,
    /// Tree height `D_rt`.
    pub height: u32,
}

#[derive(Clone, Copy, Debug)]
enum BfsMsg {
    Join,
    Child,
}

struct BfsNode {
    depth: Option<u32>,
    parent: Option<VertexId>,
    children: Vec<VertexId>,
}

impl NodeProgram for BfsNode {
    type Msg = BfsMsg;

    fn init(&mut self, ctx: &NodeCtx<'_>, out: &mut Outbox<BfsMsg>) {
        if self.depth.is_some() {
            out.send_all(ctx.degree(), &BfsMsg::Join);
        }
    }

    fn on_round(&mut self, ctx: &NodeCtx<'_>, round: u64, inbox: &[Envelope<BfsMsg>], out: &mut Outbox<BfsMsg>) {
        for env in inbox {
            if let BfsMsg::Child = env.msg {
                self.children.push(env.from);
            }
        }
        if self.depth.is_some() {
            return;
        }
        // Every Join arriving now comes from depth round-1; inboxes are
        // ordered by sender id, so the first one is the smallest.
        let Some(first) = inbox.iter().find(|e| matches!(e.msg, BfsMsg::Join)) else {
            return;
        };
        self.depth = Some(round as u32);
        self.parent = Some(first.from);
        for p in 0..ctx.degree() {
            let msg = if p == first.port { BfsMsg::Child } else { BfsMsg::Join };
            out.send(p, msg);
        }
    }

    fn is_idle(&self) -> bool {
        true
    }
}

/// Builds a BFS tree by flooding from `rt`. Parents are the smallest-id
/// neighbor one level up. Takes `D_rt + 1` rounds.
pub fn build_bfs_tree(g: &UndirectedGraph, rt: VertexId, b: usize) -> Result<(BfsTree, RoundLedger), SimError> {
    let res = run(g, b, DEFAULT_MAX_ROUNDS, |v| BfsNode {
        depth: (v == rt).then_some(0),
        parent: None,
        children: Vec::new(),
    })?;
    let unreachable: Vec<_> = (0..g.n()).filter(|&v| res.states[v].depth.is_none()).collect();
    if !unreachable.is_empty() {
        return Err(SimError::Unreachable(unreachable));
    }
    let mut tree = BfsTree {
        root: rt,
        parent: Vec::with_capacity(g.n()),
        depth: Vec::with_capacity(g.n()),
        children: Vec::with_capacity(g.n()),
        height: 0,
    };
    for mut s in res.states {
        s.children.sort_unstable();
        tree.height = tree.height.max(s.depth.unwrap());
        tree.parent.push(s.parent);
        tree.depth.push(s.depth.unwrap());
        tree.children.push(s.children);
    }
    Ok((tree, res.ledger))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{bfs_depths, gen_graph, path_graph, star_graph, GraphKind};

    #[test]
    fn path_tree() {
        let (t, ledger) = build_bfs_tree(&path_graph(5, 1), 0, 1).unwrap();
        assert_eq!(t.parent, vec![None, Some(0), Some(1), Some(2), Some(3)]);
        assert_eq!(t.height, 4);
        assert_eq!(ledger.rounds, 4 + BFS_EXTRA_ROUNDS);
        assert_eq!(t.children[2], vec![3]);
    }

    #[test]
    fn star_tree() {
        let (t, _) = build_bfs_tree(&star_graph(10, 1), 0, 1).unwrap();
        assert!(t.parent[1..].iter().all(|&p| p == Some(0)));
        assert_eq!(t.height, 1);
    }

    #[test]
    fn random_depths_match_bfs() {
        let g = gen_graph(GraphKind::Random, 64, 256, (1, 100), 7).unwrap();
        let (t, ledger) = build_bfs_tree(&g, 0, 1).unwrap();
        let depths = bfs_depths(&g, 0);
        for v in 0..64 {
            assert_eq!(Some(t.depth[v] as usize), depths[v]);
            if let Some(p) = t.parent[v] {
                assert_eq!(t.depth[p] + 1, t.depth[v]);
                let smallest = g.neighbors(v).iter().find(|nb| depths[nb.id] == Some(t.depth[v] as usize - 1));
                assert_eq!(smallest.map(|nb| nb.id), Some(p));
            }
        }
        assert!(ledger.rounds <= t.height as u64 + BFS_EXTRA_ROUNDS);
    }

    #[test]
    fn unreachable_vertices_are_listed() {
        let g = UndirectedGraph::from_edges(4, vec![crate::graph::Edge::new(0, 1, 1)]).unwrap();
        match build_bfs_tree(&g, 0, 1) {
            Err(SimError::Unreachable(vs)) => assert_eq!(vs, vec![2, 3]),
            other => panic!("unexpected {other:?}"),
        }
    }
}
