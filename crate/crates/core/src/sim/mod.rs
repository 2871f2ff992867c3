//! Deterministic simulator for the synchronous CONGEST model with `b` words
//! per edge direction per round, and the tree primitives built on it.

mod bfs;
mod engine;
mod tree;

pub use bfs::{build_bfs_tree, BfsTree, BFS_EXTRA_ROUNDS};
pub use engine::{run, Envelope, NodeCtx, NodeProgram, Outbox, RunOutcome};
pub use tree::{pipelined_broadcast, pipelined_broadcast_filtered, tree_aggregate, upcast, upcast_traced, UpcastTrace};

use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

/// Cost of a simulation, or of several run back to back.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundLedger {
    pub rounds: u64,
    /// Words delivered.
    pub messages: u64,
    /// Largest number of words carried by one edge direction in one round.
    pub peak_edge_load: u64,
}

impl Add for RoundLedger {
    type Output = RoundLedger;

    /// Sequential composition.
    fn add(self, o: RoundLedger) -> RoundLedger {
        RoundLedger {
            rounds: self.rounds + o.rounds,
            messages: self.messages + o.messages,
            peak_edge_load: self.peak_edge_load.max(o.peak_edge_load),
        }
    }
}

impl AddAssign for RoundLedger {
    fn add_assign(&mut self, o: RoundLedger) {
        *self = *self + o;
    }
}

impl std::iter::Sum for RoundLedger {
    fn sum<I: Iterator<Item = RoundLedger>>(iter: I) -> Self {
        iter.fold(RoundLedger::default(), Add::add)
    }
}

/// Generous default round cap for a single engine run.
pub(crate) const DEFAULT_MAX_ROUNDS: u64 = 50_000_000;
