//! Exact single- and multi-source shortest paths in CONGEST.
//!
//! Pipeline: BFS tree, sampling of the virtual set `V'` with the sources
//! forced in, the hopset, then Bellman-Ford over the skeleton and its hopset.
//! Each skeleton iteration has two parts. Part I gathers the virtuals'
//! estimates at the tree root and broadcasts them, and every virtual relaxes
//! its hopset edges. Part II is a Bellman-Ford in the graph itself, to the
//! skeleton hop limit, started from the virtuals. Iterations stop at the
//! first one that changes nothing (checked by a convergecast) or at the
//! worst-case bound `ceil(4|V'|/k)`. A last sweep of the same depth gives the
//! remaining vertices their distances and parents.

mod label;
mod params;
mod spt;

pub use label::{final_sweep, Estimate, Label, VirtualEstimate};
pub use params::{choose_params, ParamChoice};
pub use spt::{check_spt, tree_edges};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distance::{Distance, PathLen, VertexId};
use crate::error::{SimError, SsspError};
use crate::graph::{bfs_depths, Edge, UndirectedGraph};
use crate::hopset::{build_hopset, hop_limit, sample_virtual, VirtualSet, DEFAULT_C};
use crate::oracle::dijkstra;
use crate::sim::{build_bfs_tree, pipelined_broadcast_filtered, tree_aggregate, upcast, BfsTree, RoundLedger};

use label::{label_bf, Slot};

pub const DEFAULT_RETRY_CAP: u32 = 5;

/// How the virtual set is obtained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum VirtualChoice {
    /// Bernoulli sampling with the regime's `q`.
    Sample,
    /// Bernoulli sampling with this `q`.
    SampleWith(f64),
    /// This exact set (plus the sources). For deterministic tests.
    Forced(Vec<VertexId>),
}

/// Which virtual estimates Part I sends.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Part1Mode {
    /// Every estimate, every iteration.
    #[default]
    All,
    /// Only estimates that changed since they were last sent.
    Changed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SsspConfig {
    pub b: usize,
    pub seed: u64,
    /// Sampling constant in the hop limit `ceil(c ln n / q)`.
    pub c: f64,
    /// Overrides the regime's `k`.
    pub k: Option<usize>,
    pub virtuals: VirtualChoice,
    /// Compare with Dijkstra and retry with a fresh seed on a mismatch.
    pub verify: bool,
    pub retry_cap: u32,
    pub part1: Part1Mode,
    /// Record every virtual's estimate after every iteration.
    pub trace: bool,
}

impl Default for SsspConfig {
    fn default() -> Self {
        SsspConfig {
            b: 1,
            seed: 0,
            c: DEFAULT_C,
            k: None,
            virtuals: VirtualChoice::Sample,
            verify: true,
            retry_cap: DEFAULT_RETRY_CAP,
            part1: Part1Mode::All,
            trace: false,
        }
    }
}

/// Rounds per phase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SsspLedger {
    /// BFS tree and learning its depth.
    pub setup: RoundLedger,
    pub ksets: RoundLedger,
    /// Upcast and broadcast of the hopset edges.
    pub dissemination: RoundLedger,
    pub part1: RoundLedger,
    pub part2: RoundLedger,
    /// Termination convergecasts.
    pub checks: RoundLedger,
    pub sweep: RoundLedger,
}

impl SsspLedger {
    pub fn total(&self) -> RoundLedger {
        self.setup + self.hopset() + self.part1 + self.part2 + self.checks + self.sweep
    }

    pub fn hopset(&self) -> RoundLedger {
        self.ksets + self.dissemination
    }
}

impl std::ops::AddAssign for SsspLedger {
    fn add_assign(&mut self, o: SsspLedger) {
        self.setup += o.setup;
        self.ksets += o.ksets;
        self.dissemination += o.dissemination;
        self.part1 += o.part1;
        self.part2 += o.part2;
        self.checks += o.checks;
        self.sweep += o.sweep;
    }
}

/// Distances and shortest-path tree from one source.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SptResult {
    pub source: VertexId,
    pub dist: Vec<Distance>,
    pub parent: Vec<Option<VertexId>>,
    /// Every attempt of the source's batch, plus setup.
    pub ledger: SsspLedger,
    pub params: ParamChoice,
    pub regime: String,
    /// Seed of the accepted attempt.
    pub seed: u64,
    pub retries: u32,
    pub run: RunStats,
}

/// What the accepted attempt did.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub virtuals: usize,
    /// Hopset parameter after clamping to `|V'| - 1`.
    pub k: usize,
    pub hop_limit: usize,
    pub hopset_depth: usize,
    pub hopset_edges: usize,
    pub d_rt: u32,
    /// Skeleton iterations run, including the one that found nothing to change.
    pub iterations: usize,
    /// `ceil(4 |V'| / k)`.
    pub max_iterations: usize,
    /// Last iteration that changed some virtual's estimate.
    pub last_change: usize,
    pub fixpoint_detected: bool,
    /// `[iteration][source][virtual index]`, when tracing.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub trace: Vec<Vec<Vec<Distance>>>,
    /// Sorted virtual set, when tracing.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub virtual_set: Vec<VertexId>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MultiSourceResult {
    /// In the order the sources were given.
    pub rows: Vec<SptResult>,
    /// Everything, all batches and attempts.
    pub ledger: SsspLedger,
    pub batches: usize,
    pub retries: u32,
}

/// Single-source shortest paths from `r`.
pub fn run_sssp(g: &UndirectedGraph, r: VertexId, cfg: &SsspConfig) -> Result<SptResult, SsspError> {
    let mut m = run_multi_source(g, &[r], cfg)?;
    Ok(m.rows.pop().expect("one row per source"))
}

/// Shortest paths from every vertex of `sources`. More sources than one batch
/// holds run as consecutive batches. Vertices outside a source's component
/// get distance infinity and no parent.
pub fn run_multi_source(
    g: &UndirectedGraph,
    sources: &[VertexId],
    cfg: &SsspConfig,
) -> Result<MultiSourceResult, SsspError> {
    validate(g, sources, cfg)?;
    let n = g.n();
    let comp = components(g);
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for (i, &s) in sources.iter().enumerate() {
        match groups.iter_mut().find(|(c, _)| *c == comp[s]) {
            Some((_, idx)) => idx.push(i),
            None => groups.push((comp[s], vec![i])),
        }
    }
    let mut rows: Vec<Option<SptResult>> = vec![None; sources.len()];
    let mut total = MultiSourceResult { rows: Vec::new(), ledger: SsspLedger::default(), batches: 0, retries: 0 };
    for (c, idx) in groups {
        let members: Vec<VertexId> = (0..n).filter(|&v| comp[v] == c).collect();
        let whole = members.len() == n;
        let (sub, local_of) = if whole { (g.clone(), (0..n).collect()) } else { induced(g, &members) };
        let local_sources: Vec<VertexId> = idx.iter().map(|&i| local_of[sources[i]]).collect();
        let mut local_cfg = cfg.clone();
        if let VirtualChoice::Forced(list) = &cfg.virtuals {
            local_cfg.virtuals =
                VirtualChoice::Forced(list.iter().filter(|&&v| comp[v] == c).map(|&v| local_of[v]).collect());
        }
        let part = run_connected(&sub, &local_sources, &local_cfg)?;
        total.ledger += part.ledger;
        total.batches += part.batches;
        total.retries += part.retries;
        for (row, &i) in part.rows.into_iter().zip(&idx) {
            rows[i] = Some(if whole { row } else { lift(row, &members, n) });
        }
    }
    total.rows = rows.into_iter().map(|r| r.expect("every source has a row")).collect();
    Ok(total)
}

fn validate(g: &UndirectedGraph, sources: &[VertexId], cfg: &SsspConfig) -> Result<(), SsspError> {
    let bad = |m: String| Err(SsspError::InvalidInput(m));
    if sources.is_empty() {
        return bad("no sources".into());
    }
    if let Some(&s) = sources.iter().find(|&&s| s >= g.n()) {
        return bad(format!("source {s} is not a vertex of a {}-vertex graph", g.n()));
    }
    let mut sorted = sources.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return bad("duplicate source".into());
    }
    if cfg.b == 0 {
        return bad("bandwidth must be at least 1".into());
    }
    if cfg.k == Some(0) {
        return bad("k must be at least 1".into());
    }
    if let VirtualChoice::SampleWith(q) = cfg.virtuals {
        if !(q > 0.0 && q <= 1.0) {
            return bad(format!("q = {q} is not in (0, 1]"));
        }
    }
    if let VirtualChoice::Forced(list) = &cfg.virtuals {
        if let Some(&v) = list.iter().find(|&&v| v >= g.n()) {
            return bad(format!("forced virtual {v} is not a vertex"));
        }
    }
    Ok(())
}

fn components(g: &UndirectedGraph) -> Vec<usize> {
    let mut comp = vec![usize::MAX; g.n()];
    for s in 0..g.n() {
        if comp[s] == usize::MAX {
            for (v, d) in bfs_depths(g, s).into_iter().enumerate() {
                if d.is_some() {
                    comp[v] = s;
                }
            }
        }
    }
    comp
}

/// Subgraph on `members` (sorted) and the map from global to local ids.
fn induced(g: &UndirectedGraph, members: &[VertexId]) -> (UndirectedGraph, Vec<VertexId>) {
    let mut local = vec![usize::MAX; g.n()];
    for (i, &v) in members.iter().enumerate() {
        local[v] = i;
    }
    let edges =
        g.edges().iter().filter(|e| local[e.u] != usize::MAX).map(|e| Edge::new(local[e.u], local[e.v], e.w)).collect();
    (UndirectedGraph::from_edges(members.len(), edges).expect("subgraph of a valid graph"), local)
}

fn lift(row: SptResult, members: &[VertexId], n: usize) -> SptResult {
    let mut dist = vec![Distance::INFINITY; n];
    let mut parent = vec![None; n];
    for (i, &v) in members.iter().enumerate() {
        dist[v] = row.dist[i];
        parent[v] = row.parent[i].map(|p| members[p]);
    }
    let mut run = row.run;
    run.virtual_set = run.virtual_set.iter().map(|&v| members[v]).collect();
    SptResult { source: members[row.source], dist, parent, run, ..row }
}

/// Seed of attempt `attempt` of batch `batch`; attempt 0 of batch 0 is `seed`.
fn attempt_seed(seed: u64, batch: usize, attempt: u32) -> u64 {
    if batch == 0 && attempt == 0 {
        return seed;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((batch as u64) << 32) | attempt as u64);
    rng.gen()
}

struct ConnectedOutcome {
    rows: Vec<SptResult>,
    ledger: SsspLedger,
    batches: usize,
    retries: u32,
}

fn run_connected(g: &UndirectedGraph, sources: &[VertexId], cfg: &SsspConfig) -> Result<ConnectedOutcome, SsspError> {
    let n = g.n();
    let s = sources.len();
    let (tree, bfs) = build_bfs_tree(g, sources[0], cfg.b)?;
    let (d_rt, agg) = tree_aggregate(g, &tree, tree.depth.clone(), u32::max, true)?;
    let setup = SsspLedger { setup: bfs + agg, ..SsspLedger::default() };

    let mut params = match &cfg.virtuals {
        VirtualChoice::Forced(list) => {
            let members = VirtualSet::explicit(n, &[list.as_slice(), sources].concat());
            ParamChoice::fixed(n, members.q, cfg.k.unwrap_or(1), "forced virtuals")
        }
        VirtualChoice::SampleWith(q) => {
            let base = choose_params(n, d_rt as usize, s, cfg.b);
            ParamChoice { q: *q, ..ParamChoice::fixed(n, *q, base.k, "fixed q") }
        }
        VirtualChoice::Sample => choose_params(n, d_rt as usize, s, cfg.b),
    };
    if let Some(k) = cfg.k {
        params.k = k;
    }
    let batches = if matches!(cfg.virtuals, VirtualChoice::Sample) { params.batches.max(1) } else { 1 };
    let per_batch = s.div_ceil(batches);

    let mut out = ConnectedOutcome { rows: Vec::new(), ledger: setup, batches: 0, retries: 0 };
    for (bi, batch) in sources.chunks(per_batch).enumerate() {
        out.batches += 1;
        let mut batch_ledger = setup;
        let mut diagnostics = Vec::new();
        let mut accepted = None;
        for attempt in 0..=cfg.retry_cap {
            let seed = attempt_seed(cfg.seed, bi, attempt);
            let o = run_batch(g, &tree, d_rt, batch, &params, cfg, seed)?;
            batch_ledger += o.ledger;
            out.ledger += o.ledger;
            let failure = if cfg.verify { verify_batch(g, batch, &o) } else { None };
            match failure {
                None => {
                    accepted = Some((o, seed, attempt));
                    break;
                }
                Some(why) => {
                    log::warn!("batch {bi} attempt {attempt} (seed {seed}) failed verification: {why}; retrying");
                    diagnostics.push(format!("seed {seed}: {why}"));
                    out.retries += 1;
                }
            }
        }
        let Some((o, seed, attempt)) = accepted else {
            return Err(SsspError::ProbabilisticFailure {
                attempts: cfg.retry_cap as usize + 1,
                diagnostics: diagnostics.join("; "),
            });
        };
        for (i, &src) in batch.iter().enumerate() {
            out.rows.push(SptResult {
                source: src,
                dist: o.dist[i].clone(),
                parent: o.parent[i].clone(),
                ledger: batch_ledger,
                regime: params.regime.clone(),
                params: params.clone(),
                seed,
                retries: attempt,
                run: o.stats.clone(),
            });
        }
    }
    Ok(out)
}

fn verify_batch(g: &UndirectedGraph, batch: &[VertexId], o: &BatchOutcome) -> Option<String> {
    for (i, &src) in batch.iter().enumerate() {
        let truth = dijkstra(g, src);
        if let Some(v) = (0..g.n()).find(|&v| truth[v] != o.dist[i][v]) {
            return Some(format!("source {src}: vertex {v} has {} instead of {}", o.dist[i][v], truth[v]));
        }
        if let Err(e) = check_spt(src, &o.dist[i], &o.parent[i], |u, v| g.weight(u, v)) {
            return Some(format!("source {src}: {e}"));
        }
    }
    None
}

struct BatchOutcome {
    dist: Vec<Vec<Distance>>,
    parent: Vec<Vec<Option<VertexId>>>,
    ledger: SsspLedger,
    stats: RunStats,
}

/// One virtual's estimate for one source, broadcast in Part I.
#[derive(Clone, Copy, Debug)]
struct EstimateWord {
    vertex: VertexId,
    source: u32,
    len: PathLen,
}

#[derive(Clone, Copy)]
struct Value {
    len: PathLen,
    acquired: u32,
}

fn run_batch(
    g: &UndirectedGraph,
    tree: &BfsTree,
    d_rt: u32,
    sources: &[VertexId],
    params: &ParamChoice,
    cfg: &SsspConfig,
    seed: u64,
) -> Result<BatchOutcome, SimError> {
    let n = g.n();
    let s = sources.len();
    let b = cfg.b;
    let vset = match &cfg.virtuals {
        VirtualChoice::Forced(list) => VirtualSet::explicit(n, &[list.as_slice(), sources].concat()),
        VirtualChoice::SampleWith(q) => sample_virtual(n, *q, seed, sources),
        VirtualChoice::Sample => sample_virtual(n, params.q, seed, sources),
    };
    let vs = &vset.members;
    // The sampling probability, or |V'|/n for a forced set.
    let q = vset.q;
    let h = hop_limit(n, q, cfg.c);
    let k = params.k.min(vs.len().saturating_sub(1));
    let built = build_hopset(g, vs, k, h * k, b, tree)?;
    let mut ledger = SsspLedger {
        ksets: built.ledger.ksets,
        dissemination: built.ledger.upcast + built.ledger.broadcast,
        ..SsspLedger::default()
    };
    let mut index = vec![usize::MAX; n];
    for (i, &v) in vs.iter().enumerate() {
        index[v] = i;
    }

    let mut value: Vec<Vec<Option<Value>>> = vec![vec![None; s]; vs.len()];
    for (si, &src) in sources.iter().enumerate() {
        value[index[src]][si] = Some(Value { len: PathLen::ZERO, acquired: 0 });
    }
    let mut unsent = vec![vec![true; s]; vs.len()];
    let max_iterations = (4 * vs.len()).div_ceil(k.max(1));
    let mut stats = RunStats {
        virtuals: vs.len(),
        k,
        hop_limit: h,
        hopset_depth: built.depth,
        hopset_edges: built.hopset.len(),
        d_rt,
        max_iterations,
        ..RunStats::default()
    };
    if cfg.trace {
        stats.virtual_set = vs.clone();
    }

    for it in 1..=max_iterations {
        stats.iterations = it;
        let mut changed = vec![false; n];

        // Part I: every virtual's estimates to every virtual, then hopset relaxation.
        let mut placements = vec![Vec::new(); n];
        for (i, &v) in vs.iter().enumerate() {
            for si in 0..s {
                let send = match cfg.part1 {
                    Part1Mode::All => true,
                    Part1Mode::Changed => unsent[i][si] && value[i][si].is_some(),
                };
                if send {
                    let len = value[i][si].map_or(PathLen::INFINITY, |x| x.len);
                    placements[v].push(EstimateWord { vertex: v, source: si as u32, len });
                    unsent[i][si] = false;
                }
            }
        }
        let (collected, up) = upcast(g, tree, placements, b)?;
        let known = &built.known;
        let (copies, down) = pipelined_broadcast_filtered(g, tree, collected, b, |v, w: &EstimateWord| {
            known[v].binary_search_by_key(&w.vertex, |x| x.0).is_ok()
        })?;
        ledger.part1 += up + down;
        for (i, &v) in vs.iter().enumerate() {
            for w in &copies[v] {
                if !w.len.is_finite() {
                    continue;
                }
                let edge = known[v][known[v].binary_search_by_key(&w.vertex, |x| x.0).unwrap()].1;
                let cand = w.len.join(edge);
                let slot = &mut value[i][w.source as usize];
                if slot.map_or(true, |x| cand < x.len) {
                    *slot = Some(Value { len: cand, acquired: it as u32 });
                    unsent[i][w.source as usize] = true;
                    changed[v] = true;
                }
            }
        }

        // Part II: Bellman-Ford in the graph from the virtuals.
        let (slots, l2) = label_bf(g, own_labels(n, vs, &value, s), s, h, b)?;
        ledger.part2 += l2;
        for (i, &v) in vs.iter().enumerate() {
            for si in 0..s {
                let Some(cur) = slots[v][si].current() else { continue };
                if value[i][si].map_or(true, |x| cur.len() < x.len) {
                    value[i][si] = Some(Value { len: cur.len(), acquired: it as u32 });
                    unsent[i][si] = true;
                    changed[v] = true;
                }
            }
        }
        if cfg.trace {
            stats.trace.push(
                (0..s)
                    .map(|si| value.iter().map(|x| x[si].map_or(Distance::INFINITY, |x| x.len.dist)).collect())
                    .collect(),
            );
        }

        let (any, l3) = tree_aggregate(g, tree, changed, |a, b| a || b, true)?;
        ledger.checks += l3;
        if any {
            stats.last_change = it;
        } else {
            stats.fixpoint_detected = true;
            break;
        }
    }

    let (slots, sweep) = label_bf(g, own_labels(n, vs, &value, s), s, h, b)?;
    ledger.sweep = sweep;
    let (dist, parent) = (0..s).map(|si| read_source(&slots, si)).unzip();
    Ok(BatchOutcome { dist, parent, ledger, stats })
}

fn own_labels(n: usize, vs: &[VertexId], value: &[Vec<Option<Value>>], s: usize) -> Vec<Vec<Option<Label>>> {
    let mut own = vec![vec![None; s]; n];
    for (i, &v) in vs.iter().enumerate() {
        for si in 0..s {
            own[v][si] = value[i][si].map(|x| Label::own(v, x.len, x.acquired));
        }
    }
    own
}

fn read_source(slots: &[Vec<Slot>], si: usize) -> (Vec<Distance>, Vec<Option<VertexId>>) {
    slots
        .iter()
        .map(|per| {
            let slot = &per[si];
            (slot.current().map_or(Distance::INFINITY, |l| l.dist), slot.parent())
        })
        .unzip()
}

/// Largest distance from the source, learned by a convergecast over `tree`.
/// For connected graphs the weighted diameter lies in `[ecc, 2 ecc]`.
pub fn diameter_2approx(
    g: &UndirectedGraph,
    result: &SptResult,
    tree: &BfsTree,
) -> Result<(Distance, RoundLedger), SimError> {
    tree_aggregate(g, tree, result.dist.clone(), Distance::max, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::path_graph;

    fn forced(vs: &[VertexId], k: usize) -> SsspConfig {
        SsspConfig { k: Some(k), virtuals: VirtualChoice::Forced(vs.to_vec()), ..SsspConfig::default() }
    }

    #[test]
    fn p5_forced() {
        let g = path_graph(5, 1);
        let r = run_sssp(&g, 0, &forced(&[0, 2, 4], 1)).unwrap();
        assert_eq!(r.dist, (0..5).map(Distance::new).collect::<Vec<_>>());
        assert_eq!(r.parent, vec![None, Some(0), Some(1), Some(2), Some(3)]);
        assert_eq!(r.retries, 0);
        assert_eq!(r.run.virtuals, 3);
    }

    #[test]
    fn triangle() {
        let g = UndirectedGraph::parse("3 3\n0 1 1\n1 2 1\n0 2 3").unwrap();
        let r = run_sssp(&g, 0, &SsspConfig::default()).unwrap();
        assert_eq!(r.dist, vec![Distance::new(0), Distance::new(1), Distance::new(2)]);
        assert_eq!(r.parent[2], Some(1));
    }

    #[test]
    fn zero_weights() {
        let g = UndirectedGraph::parse("3 3\n0 1 0\n0 2 0\n1 2 0").unwrap();
        let r = run_sssp(&g, 0, &SsspConfig::default()).unwrap();
        assert_eq!(tree_edges(&r.parent), 2);
        assert!(check_spt(0, &r.dist, &r.parent, |u, v| g.weight(u, v)).is_ok());
    }

    #[test]
    fn disconnected_vertices_stay_infinite() {
        let g = UndirectedGraph::parse("5 2\n0 1 3\n3 4 1").unwrap();
        let r = run_sssp(&g, 1, &SsspConfig::default()).unwrap();
        assert_eq!(r.dist[0], Distance::new(3));
        assert!(r.dist[2].is_infinite() && r.dist[3].is_infinite());
        assert_eq!(r.parent[0], Some(1));
        assert_eq!(r.parent[4], None);
    }

    #[test]
    fn bad_inputs() {
        let g = path_graph(3, 1);
        assert!(matches!(run_multi_source(&g, &[], &SsspConfig::default()), Err(SsspError::InvalidInput(_))));
        assert!(matches!(run_multi_source(&g, &[0, 0], &SsspConfig::default()), Err(SsspError::InvalidInput(_))));
        assert!(matches!(run_sssp(&g, 7, &SsspConfig::default()), Err(SsspError::InvalidInput(_))));
    }

    #[test]
    fn diameter_bracket_on_path() {
        let g = path_graph(5, 1);
        let r = run_sssp(&g, 0, &SsspConfig::default()).unwrap();
        let (tree, _) = build_bfs_tree(&g, 0, 1).unwrap();
        let (ecc, ledger) = diameter_2approx(&g, &r, &tree).unwrap();
        assert_eq!(ecc, Distance::new(4));
        assert_eq!(ledger.rounds, 4);
    }
}
