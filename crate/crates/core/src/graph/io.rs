//! Edge-list text format.
//!
//! ```text
//! n m [directed]
//! u v w
//! ...
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Line numbers in
//! errors are physical (1-based) line numbers.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::distance::{VertexId, Weight};
use crate::error::{GraphError, ParseErrorKind};
use crate::graph::{DirectedGraph, Edge, UndirectedGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphMode {
    Undirected,
    Directed,
}

impl GraphMode {
    fn name(self) -> &'static str {
        match self {
            GraphMode::Undirected => "undirected",
            GraphMode::Directed => "directed",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Header {
    pub n: usize,
    pub m: usize,
    pub mode: GraphMode,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyGraph {
    Undirected(UndirectedGraph),
    Directed(DirectedGraph),
}

pub fn parse_header(line: &str) -> Result<Header, ParseErrorKind> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    let (n, m, mode) = match fields.as_slice() {
        [n, m] => (n, m, GraphMode::Undirected),
        [n, m, "directed"] => (n, m, GraphMode::Directed),
        [n, m, "undirected"] => (n, m, GraphMode::Undirected),
        _ => return Err(ParseErrorKind::Header),
    };
    let n = n.parse().map_err(|_| ParseErrorKind::Header)?;
    let m = m.parse().map_err(|_| ParseErrorKind::Header)?;
    Ok(Header { n, m, mode })
}

/// Parses `u v w`, checking the endpoint range and self-loops.
pub fn parse_edge_line(line: &str, n: usize) -> Result<Edge, ParseErrorKind> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    let [u, v, w] = fields.as_slice() else {
        return Err(ParseErrorKind::Malformed);
    };
    let u: u64 = u.parse().map_err(|_| ParseErrorKind::Malformed)?;
    let v: u64 = v.parse().map_err(|_| ParseErrorKind::Malformed)?;
    let w: Weight = w.parse().map_err(|_| ParseErrorKind::Malformed)?;
    if w == Weight::MAX || w == Weight::MIN {
        return Err(ParseErrorKind::Malformed);
    }
    for x in [u, v] {
        if x >= n as u64 {
            return Err(ParseErrorKind::VertexRange(x));
        }
    }
    let (u, v) = (u as VertexId, v as VertexId);
    if u == v {
        return Err(ParseErrorKind::SelfLoop(u));
    }
    Ok(Edge::new(u, v, w))
}

/// True for lines the format ignores.
pub(crate) fn is_skippable(line: &str) -> bool {
    let t = line.trim_start();
    t.is_empty() || t.starts_with('#')
}

/// Parses a whole graph from a reader in the given mode.
pub fn parse_graph<R: BufRead>(reader: R, mode: GraphMode) -> Result<AnyGraph, GraphError> {
    let mut header: Option<Header> = None;
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut last_line = 0;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let line = line.map_err(|e| GraphError::Io { path: "<input>".into(), source: e })?;
        if is_skippable(&line) {
            continue;
        }
        let err = |kind| GraphError::Parse { line: lineno, kind };
        let Some(h) = header else {
            let h = parse_header(&line).map_err(err)?;
            if h.mode != mode {
                return Err(err(ParseErrorKind::Mode { expected: mode.name(), found: h.mode.name() }));
            }
            header = Some(h);
            continue;
        };
        let e = parse_edge_line(&line, h.n).map_err(err)?;
        let key = match mode {
            GraphMode::Undirected => {
                if e.w < 0 {
                    return Err(err(ParseErrorKind::NegativeWeight(e.w)));
                }
                (e.u.min(e.v), e.u.max(e.v))
            }
            GraphMode::Directed => (e.u, e.v),
        };
        if !seen.insert(key) {
            return Err(err(ParseErrorKind::Duplicate(e.u, e.v)));
        }
        if edges.len() == h.m {
            return Err(err(ParseErrorKind::EdgeCount { expected: h.m, found: h.m + 1 }));
        }
        edges.push(e);
    }
    let Some(h) = header else {
        return Err(GraphError::Parse { line: last_line.max(1), kind: ParseErrorKind::Header });
    };
    if edges.len() != h.m {
        let kind = ParseErrorKind::EdgeCount { expected: h.m, found: edges.len() };
        return Err(GraphError::Parse { line: last_line, kind });
    }
    Ok(match mode {
        GraphMode::Undirected => AnyGraph::Undirected(UndirectedGraph::from_edges(h.n, edges)?),
        GraphMode::Directed => AnyGraph::Directed(DirectedGraph::from_arcs(h.n, edges)?),
    })
}

pub fn load_graph(path: impl AsRef<Path>, mode: GraphMode) -> Result<AnyGraph, GraphError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| GraphError::Io { path: path.into(), source: e })?;
    parse_graph(BufReader::new(file), mode)
}

impl UndirectedGraph {
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        match parse_graph(text.as_bytes(), GraphMode::Undirected)? {
            AnyGraph::Undirected(g) => Ok(g),
            AnyGraph::Directed(_) => unreachable!(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, GraphError> {
        match load_graph(path, GraphMode::Undirected)? {
            AnyGraph::Undirected(g) => Ok(g),
            AnyGraph::Directed(_) => unreachable!(),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), GraphError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_edge_list()).map_err(|e| GraphError::Io { path: path.into(), source: e })
    }
}

impl DirectedGraph {
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        match parse_graph(text.as_bytes(), GraphMode::Directed)? {
            AnyGraph::Directed(g) => Ok(g),
            AnyGraph::Undirected(_) => unreachable!(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, GraphError> {
        match load_graph(path, GraphMode::Directed)? {
            AnyGraph::Directed(g) => Ok(g),
            AnyGraph::Undirected(_) => unreachable!(),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), GraphError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_edge_list()).map_err(|e| GraphError::Io { path: path.into(), source: e })
    }
}
