//! Multipass semi-streaming shortest paths.
//!
//! An [`EdgeStream`] hands out the edges in the same order on every pass and
//! counts passes. Algorithms keep everything else in resident memory and
//! charge it to a [`WordMeter`]: one word per stored edge, tuple or estimate.

mod directed;
mod undirected;

pub use directed::{directed_stream_sssp, directed_stream_verified, CycleReport, DirectedConfig, DirectedStreamResult};
pub use undirected::{
    build_k_neighborhood, stream_hopset, stream_multi_source, stream_sssp, NeighborhoodGraph, StreamHopset,
    StreamResult, StreamSpt, UNDIRECTED_WORDS_C,
};

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::distance::VertexId;
use crate::error::{GraphError, ParseErrorKind, StreamError};
use crate::graph::{
    is_skippable, parse_edge_line, parse_header, DirectedGraph, Edge, GraphMode, Header, UndirectedGraph,
};

/// A read-only edge sequence traversed in full, in a fixed order, per pass.
pub trait EdgeStream {
    fn n(&self) -> usize;

    fn directed(&self) -> bool;

    /// One full traversal. Increments the pass count once.
    fn pass(&mut self, f: &mut dyn FnMut(Edge)) -> Result<(), StreamError>;

    fn pass_count(&self) -> u64;
}

/// Passes and peak resident words of one run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassLedger {
    pub passes: u64,
    pub peak_words: u64,
}

/// Running count of resident words and its maximum.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct WordMeter {
    current: u64,
    peak: u64,
}

impl WordMeter {
    pub fn alloc(&mut self, words: usize) {
        self.current += words as u64;
        self.peak = self.peak.max(self.current);
    }

    pub fn free(&mut self, words: usize) {
        self.current -= words as u64;
    }

    pub fn peak(&self) -> u64 {
        self.peak
    }
}

/// A stream over edges held in memory, for tests and generated graphs.
#[derive(Clone, Debug)]
pub struct MemoryStream {
    n: usize,
    directed: bool,
    edges: Vec<Edge>,
    passes: u64,
}

impl MemoryStream {
    pub fn undirected(g: &UndirectedGraph) -> Self {
        MemoryStream { n: g.n(), directed: false, edges: g.edges().to_vec(), passes: 0 }
    }

    pub fn directed(g: &DirectedGraph) -> Self {
        MemoryStream { n: g.n(), directed: true, edges: g.arcs().to_vec(), passes: 0 }
    }
}

impl EdgeStream for MemoryStream {
    fn n(&self) -> usize {
        self.n
    }

    fn directed(&self) -> bool {
        self.directed
    }

    fn pass(&mut self, f: &mut dyn FnMut(Edge)) -> Result<(), StreamError> {
        self.passes += 1;
        self.edges.iter().for_each(|&e| f(e));
        Ok(())
    }

    fn pass_count(&self) -> u64 {
        self.passes
    }
}

/// A stream that re-reads a graph file on every pass. Only the header is
/// kept between passes; edges are parsed line by line.
#[derive(Clone, Debug)]
pub struct FileStream {
    path: PathBuf,
    header: Header,
    passes: u64,
}

impl FileStream {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, StreamError> {
        let path = path.as_ref().to_path_buf();
        let reader = BufReader::new(File::open(&path).map_err(|e| io_err(&path, e))?);
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| io_err(&path, e))?;
            if is_skippable(&line) {
                continue;
            }
            let header = parse_header(&line).map_err(|kind| GraphError::Parse { line: i + 1, kind })?;
            return Ok(FileStream { path, header, passes: 0 });
        }
        Err(GraphError::Parse { line: 1, kind: ParseErrorKind::Header }.into())
    }
}

fn io_err(path: &Path, source: std::io::Error) -> StreamError {
    GraphError::Io { path: path.to_path_buf(), source }.into()
}

impl EdgeStream for FileStream {
    fn n(&self) -> usize {
        self.header.n
    }

    fn directed(&self) -> bool {
        self.header.mode == GraphMode::Directed
    }

    fn pass(&mut self, f: &mut dyn FnMut(Edge)) -> Result<(), StreamError> {
        self.passes += 1;
        let reader = BufReader::new(File::open(&self.path).map_err(|e| io_err(&self.path, e))?);
        let mut seen_header = false;
        let mut count = 0;
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| io_err(&self.path, e))?;
            if is_skippable(&line) {
                continue;
            }
            if !seen_header {
                seen_header = true;
                continue;
            }
            let parse = |kind| GraphError::Parse { line: i + 1, kind };
            let e = parse_edge_line(&line, self.header.n).map_err(parse)?;
            if !self.directed() && e.w < 0 {
                return Err(parse(ParseErrorKind::NegativeWeight(e.w)).into());
            }
            count += 1;
            f(e);
        }
        if count != self.header.m {
            let kind = ParseErrorKind::EdgeCount { expected: self.header.m, found: count };
            return Err(GraphError::Invalid(kind).into());
        }
        Ok(())
    }

    fn pass_count(&self) -> u64 {
        self.passes
    }
}

fn check_sources(n: usize, sources: &[VertexId]) -> Result<(), StreamError> {
    if sources.is_empty() {
        return Err(StreamError::InvalidInput("no sources".into()));
    }
    if let Some(s) = sources.iter().find(|&&s| s >= n) {
        return Err(StreamError::InvalidInput(format!("source {s} is not a vertex of a {n}-vertex graph")));
    }
    let mut sorted = sources.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(StreamError::InvalidInput("duplicate source".into()));
    }
    Ok(())
}
