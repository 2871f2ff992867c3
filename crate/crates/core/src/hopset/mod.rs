//! The k-shortcut hopset of the skeleton graph, built without materializing
//! the skeleton: a k-set Bellman-Ford from the virtual vertices, followed by
//! an upcast and a filtered broadcast over the BFS tree so that both
//! endpoints of every hopset edge learn it.

mod ksets;
mod sample;
mod verify;

pub use ksets::{distributed_ksets, distributed_ksets_traced, SetHistory};
pub use sample::{sample_virtual, VirtualSet};
pub use verify::{
    definitional_hopset, hopbound_violation, union_with_hopset, verify_hopbound, verify_set_equalities, SetComparison,
    SetEqualityReport, SetViolation,
};

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::distance::{PathLen, VertexId};
use crate::error::{GraphError, ParseErrorKind, SimError};
use crate::graph::{is_skippable, parse_edge_line, Edge, UndirectedGraph};
use crate::sim::{pipelined_broadcast_filtered, upcast, BfsTree, RoundLedger};
use crate::tuple::KNearestSet;

/// Default sampling constant `c` in `q`-dependent hop limits.
pub const DEFAULT_C: f64 = 2.0;

/// One selection `to in S[k](from)`, with the length of the path realizing it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HopsetEdge {
    pub from: VertexId,
    pub to: VertexId,
    pub len: PathLen,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hopset {
    pub k: usize,
    /// Selections grouped by `from`, each group in rank order.
    pub edges: Vec<HopsetEdge>,
}

impl Hopset {
    pub fn from_sets(k: usize, owners: impl IntoIterator<Item = VertexId>, sets: &[KNearestSet]) -> Self {
        let mut edges = Vec::new();
        for v in owners {
            for t in sets[v].iter().filter(|t| t.origin != v).take(k) {
                edges.push(HopsetEdge { from: v, to: t.origin, len: t.len() });
            }
        }
        Hopset { k, edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Symmetric closure: for every vertex, its hopset neighbors with the
    /// shorter of the two selection lengths, sorted by neighbor id.
    pub fn incident(&self, n: usize) -> Vec<Vec<(VertexId, PathLen)>> {
        closure(n, self.edges.iter().copied())
    }

    /// Edge-list text with a `# hopset k=K` header. Hop counts are not kept.
    pub fn to_text(&self) -> String {
        let mut s = format!("# hopset k={}\n", self.k);
        for e in &self.edges {
            writeln!(s, "{} {} {}", e.from, e.to, e.len.dist).unwrap();
        }
        s
    }
}

/// Reads [`Hopset::to_text`] output back as `(k, edges)`. Every endpoint must
/// be below `n`.
pub fn parse_hopset_text(text: &str, n: usize) -> Result<(usize, Vec<Edge>), GraphError> {
    let mut lines = text.lines().enumerate();
    let k = lines
        .next()
        .and_then(|(_, l)| l.trim().strip_prefix("# hopset k="))
        .and_then(|k| k.trim().parse().ok())
        .ok_or(GraphError::Parse { line: 1, kind: ParseErrorKind::Header })?;
    let mut edges = Vec::new();
    for (i, line) in lines {
        if is_skippable(line) {
            continue;
        }
        edges.push(parse_edge_line(line, n).map_err(|kind| GraphError::Parse { line: i + 1, kind })?);
    }
    Ok((k, edges))
}

pub(crate) fn closure(n: usize, edges: impl Iterator<Item = HopsetEdge>) -> Vec<Vec<(VertexId, PathLen)>> {
    let mut inc: Vec<Vec<(VertexId, PathLen)>> = vec![Vec::new(); n];
    for e in edges {
        inc[e.from].push((e.to, e.len));
        inc[e.to].push((e.from, e.len));
    }
    for l in &mut inc {
        l.sort_unstable();
        l.dedup_by_key(|x| x.0);
    }
    inc
}

fn incident_at(v: VertexId, edges: &[HopsetEdge]) -> Vec<(VertexId, PathLen)> {
    let mut l: Vec<_> = edges.iter().map(|e| if e.from == v { (e.to, e.len) } else { (e.from, e.len) }).collect();
    l.sort_unstable();
    l.dedup_by_key(|x| x.0);
    l
}

/// Hop limit `ceil(c ln n / q)` between consecutive virtuals.
pub fn hop_limit(n: usize, q: f64, c: f64) -> usize {
    ((c * (n.max(2) as f64).ln() / q).ceil() as usize).max(1)
}

/// Super-rounds of the k-set Bellman-Ford: `k` skeleton hops of
/// [`hop_limit`] graph hops each.
pub fn hopset_depth(n: usize, q: f64, k: usize, c: f64) -> usize {
    hop_limit(n, q, c) * k
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HopsetLedger {
    pub ksets: RoundLedger,
    pub upcast: RoundLedger,
    pub broadcast: RoundLedger,
}

impl HopsetLedger {
    pub fn total(&self) -> RoundLedger {
        self.ksets + self.upcast + self.broadcast
    }
}

/// Everything the construction leaves behind.
#[derive(Clone, Debug)]
pub struct HopsetBuild {
    pub hopset: Hopset,
    /// Effective k after clamping to `|V'| - 1`.
    pub k: usize,
    pub depth: usize,
    /// Hopset neighbors each vertex learned from the broadcast.
    pub known: Vec<Vec<(VertexId, PathLen)>>,
    pub ledger: HopsetLedger,
}

/// Builds the hopset with `depth` super-rounds (see [`hopset_depth`]) and
/// disseminates it over `tree`. The k-set run carries `k + 1` records per
/// vertex because a virtual's own list starts with itself.
pub fn build_hopset(
    g: &UndirectedGraph,
    virtuals: &[VertexId],
    k: usize,
    depth: usize,
    b: usize,
    tree: &BfsTree,
) -> Result<HopsetBuild, SimError> {
    assert!(!virtuals.is_empty(), "no virtual vertices");
    let n = g.n();
    let k_eff = k.min(virtuals.len() - 1);
    if k_eff < k {
        log::warn!("k = {k} exceeds |V'| - 1 = {}; clamped", virtuals.len() - 1);
    }
    if k_eff == 0 {
        return Ok(HopsetBuild {
            hopset: Hopset { k: 0, edges: Vec::new() },
            k: 0,
            depth: 0,
            known: vec![Vec::new(); n],
            ledger: HopsetLedger::default(),
        });
    }
    let (sets, ksets) = distributed_ksets(g, virtuals, k_eff + 1, depth, b)?;
    let hopset = Hopset::from_sets(k_eff, virtuals.iter().copied(), &sets);

    let mut placements = vec![Vec::new(); n];
    for e in &hopset.edges {
        placements[e.from].push(*e);
    }
    let (collected, up) = upcast(g, tree, placements, b)?;
    let (copies, down) =
        pipelined_broadcast_filtered(g, tree, collected, b, |v, e: &HopsetEdge| e.from == v || e.to == v)?;
    let known = copies.iter().enumerate().map(|(v, c)| incident_at(v, c)).collect();

    Ok(HopsetBuild { hopset, k: k_eff, depth, known, ledger: HopsetLedger { ksets, upcast: up, broadcast: down } })
}
