//! Error types shared across the crate.

use std::path::PathBuf;

use thiserror::Error;

use crate::distance::VertexId;
use crate::sim::RoundLedger;

/// What went wrong on a specific line of a graph file.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("malformed header, expected `n m` or `n m directed`")]
    Header,
    #[error("malformed edge line, expected `u v w` with integer fields")]
    Malformed,
    #[error("vertex {0} out of range")]
    VertexRange(u64),
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge ({0}, {1})")]
    Duplicate(VertexId, VertexId),
    #[error("negative weight {0} in undirected mode")]
    NegativeWeight(i64),
    #[error("expected {expected} edges, found {found}")]
    EdgeCount { expected: usize, found: usize },
    #[error("file declares a {found} graph, {expected} expected")]
    Mode { expected: &'static str, found: &'static str },
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {kind}")]
    Parse { line: usize, kind: ParseErrorKind },
    #[error("{0}")]
    Invalid(ParseErrorKind),
    #[error("infeasible density: n = {n}, m = {m}")]
    InfeasibleDensity { n: usize, m: usize },
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
}

/// Oracle refused to run because the input exceeds its size guard.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{what}: n = {n} exceeds oracle cap {cap}")]
pub struct OracleScaleError {
    pub what: &'static str,
    pub n: usize,
    pub cap: usize,
}

#[derive(Debug, Clone, Error)]
pub enum SimError {
    #[error("bandwidth fault in round {round}: {from} -> {to} carried {load} words, limit {b}")]
    Bandwidth { round: u64, from: VertexId, to: VertexId, load: usize, b: usize },
    #[error("no quiescence after {} rounds", partial.rounds)]
    Timeout { partial: RoundLedger },
    #[error("vertices unreachable from the root: {0:?}")]
    Unreachable(Vec<VertexId>),
}

/// Parent pointers that do not form a shortest-path forest.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SptError {
    #[error("parent pointers contain a cycle through vertex {0}")]
    Cycle(VertexId),
    #[error("reachable vertex {0} has no parent")]
    MissingParent(VertexId),
    #[error("vertex {v}: tree distance {tree} differs from label {label}")]
    TreeDistance { v: VertexId, tree: String, label: String },
    #[error("parent edge ({0}, {1}) is not a graph edge")]
    NotAnEdge(VertexId, VertexId),
}

#[derive(Debug, Error)]
pub enum SsspError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("verification failed after {attempts} attempts: {diagnostics}")]
    ProbabilisticFailure { attempts: usize, diagnostics: String },
}

#[derive(Debug, Error)]
pub enum StreamError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no fixpoint after {0} passes")]
    NoFixpoint(u64),
    #[error("verification failed after {attempts} attempts: {diagnostics}")]
    ProbabilisticFailure { attempts: usize, diagnostics: String },
}
