//! Exact shortest paths in the CONGEST model and in multipass streams.
//!
//! The crate contains a deterministic round simulator for CONGEST with `b`
//! words per edge per round, a distributed k-shortcut hopset construction over
//! a sampled skeleton, the skeleton Bellman-Ford that turns it into exact
//! single- and multi-source shortest-path trees, semi-streaming counterparts
//! for undirected graphs and for digraphs with negative weights, and
//! centralized oracles that every one of those is tested against.

pub mod distance;
pub mod error;
pub mod graph;
pub mod harness;
pub mod hopset;
pub mod oracle;
pub mod sim;
pub mod sssp;
pub mod stream;
pub mod tuple;

pub use distance::{Distance, PathLen, VertexId, Weight};
pub use error::{GraphError, OracleScaleError, ParseErrorKind, SimError, SptError, SsspError, StreamError};
pub use graph::{DirectedGraph, Edge, UndirectedGraph};
pub use sim::{BfsTree, RoundLedger};
pub use tuple::{DistTuple, KNearestSet};
