//! Digraphs with signed weights: Bellman-Ford passes from sampled virtual
//! vertices, an offline Bellman-Ford over the virtual digraph they induce,
//! and negative-cycle detection.
//!
//! Passes `1..=Γ` explore from every virtual and end in a frozen snapshot of
//! the Γ-limited estimates. The virtual digraph and the per-source distances
//! `min_v' d_G'(r, v') + d^Γ(v', v)` come from that snapshot. Passes
//! `Γ+1..=2Γ` continue Bellman-Ford from those distances; any estimate that
//! still drops proves a negative cycle reachable from a source.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distance::{Distance, PathLen, VertexId, Weight};
use crate::error::StreamError;
use crate::graph::DirectedGraph;
use crate::hopset::sample_virtual;
use crate::oracle::bellman_ford_directed;
use crate::stream::{check_sources, EdgeStream, MemoryStream, PassLedger, StreamSpt, WordMeter};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectedConfig {
    pub k: usize,
    pub seed: u64,
    /// Constant in `Γ = ceil(c (n/k) ln n)`.
    pub c: f64,
    /// Per-vertex estimate cap is `ceil(cap_c k ln n)`; overflow retries.
    pub cap_c: f64,
    pub retry_cap: u32,
}

impl Default for DirectedConfig {
    fn default() -> Self {
        DirectedConfig { k: 8, seed: 0, c: 2.0, cap_c: 4.0, retry_cap: 5 }
    }
}

/// Whether a negative cycle reachable from a source was found.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleReport {
    pub detected: bool,
    /// A closed walk `v0, v1, ..., v0` of negative total weight, when the
    /// cycle was found in the virtual digraph.
    pub witness: Option<Vec<VertexId>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectedStreamResult {
    /// Empty when a cycle was detected.
    pub rows: Vec<StreamSpt>,
    pub cycle: CycleReport,
    pub ledger: PassLedger,
    pub gamma: usize,
    pub virtuals: usize,
    /// Seed of the accepted attempt.
    pub seed: u64,
    pub retries: u32,
}

/// One stored estimate: from virtual `virt`, with the in-arc it came over.
#[derive(Clone, Copy, Debug)]
struct Entry {
    virt: u32,
    dist: Weight,
    parent: VertexId,
    w: Weight,
}

enum Attempt {
    Done(DirectedStreamResult),
    /// Resampling may help: estimate cap overflow or a path that did not unfold.
    Retry(String),
}

/// Shortest paths from `sources` or a negative-cycle report. Attempts whose
/// sample overflows the per-vertex cap are retried with a fresh seed.
pub fn directed_stream_sssp(
    stream: &mut dyn EdgeStream,
    sources: &[VertexId],
    cfg: &DirectedConfig,
) -> Result<DirectedStreamResult, StreamError> {
    check_sources(stream.n(), sources)?;
    if !stream.directed() {
        return Err(StreamError::InvalidInput("directed stream expected".into()));
    }
    if cfg.k == 0 {
        return Err(StreamError::InvalidInput("k must be at least 1".into()));
    }
    let mut diagnostics = Vec::new();
    for attempt in 0..=cfg.retry_cap {
        let seed = attempt_seed(cfg.seed, attempt);
        match run_attempt(stream, sources, cfg, seed)? {
            Attempt::Done(mut r) => {
                r.retries = attempt;
                return Ok(r);
            }
            Attempt::Retry(why) => {
                log::warn!("directed stream attempt {attempt} (seed {seed}): {why}; retrying");
                diagnostics.push(format!("seed {seed}: {why}"));
            }
        }
    }
    Err(StreamError::ProbabilisticFailure { attempts: cfg.retry_cap as usize + 1, diagnostics: diagnostics.join("; ") })
}

/// [`directed_stream_sssp`] over an in-memory digraph, checked against
/// Bellman-Ford: distances must match, or a cycle must be reported exactly
/// when one is reachable. Mismatches retry with a fresh seed.
pub fn directed_stream_verified(
    g: &DirectedGraph,
    sources: &[VertexId],
    cfg: &DirectedConfig,
) -> Result<DirectedStreamResult, StreamError> {
    let truth: Vec<Result<Vec<Distance>, VertexId>> = sources.iter().map(|&r| bellman_ford_directed(g, r)).collect();
    let has_cycle = truth.iter().any(Result::is_err);
    let mut diagnostics = Vec::new();
    let mut retries = 0;
    for attempt in 0..=cfg.retry_cap {
        let c = DirectedConfig { seed: attempt_seed(cfg.seed, attempt), retry_cap: 0, ..cfg.clone() };
        let r = match directed_stream_sssp(&mut MemoryStream::directed(g), sources, &c) {
            Ok(r) => r,
            Err(StreamError::ProbabilisticFailure { diagnostics: d, .. }) => {
                diagnostics.push(d);
                retries += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let ok = if has_cycle {
            r.cycle.detected
        } else {
            !r.cycle.detected && r.rows.iter().zip(&truth).all(|(row, t)| t.as_ref().is_ok_and(|d| *d == row.dist))
        };
        if ok {
            return Ok(DirectedStreamResult { retries, seed: c.seed, ..r });
        }
        let why = format!("seed {}: result disagrees with Bellman-Ford (cycle expected: {has_cycle})", c.seed);
        log::warn!("{why}; retrying");
        diagnostics.push(why);
        retries += 1;
    }
    Err(StreamError::ProbabilisticFailure { attempts: cfg.retry_cap as usize + 1, diagnostics: diagnostics.join("; ") })
}

fn attempt_seed(seed: u64, attempt: u32) -> u64 {
    if attempt == 0 {
        return seed;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(attempt as u64);
    rng.gen()
}

/// `ceil(c (n/k) ln n)`, at least 1.
pub(crate) fn gamma(n: usize, k: usize, c: f64) -> usize {
    let n = n.max(2) as f64;
    ((c * n / k as f64 * n.ln()).ceil() as usize).max(1)
}

fn run_attempt(
    stream: &mut dyn EdgeStream,
    sources: &[VertexId],
    cfg: &DirectedConfig,
    seed: u64,
) -> Result<Attempt, StreamError> {
    let n = stream.n();
    let s = sources.len();
    let k = cfg.k.max(s).min(n.max(1));
    let start = stream.pass_count();
    let mut meter = WordMeter::default();
    let vset = sample_virtual(n, (k as f64 / n as f64).min(1.0), seed, sources);
    let vs = vset.members;
    let mut index = vec![u32::MAX; n];
    for (i, &v) in vs.iter().enumerate() {
        index[v] = i as u32;
    }
    let g = gamma(n, k, cfg.c);
    let cap = (cfg.cap_c * k as f64 * (n.max(2) as f64).ln()).ceil() as usize;

    // Passes 1..=Γ: synchronous Bellman-Ford from every virtual.
    let mut est: Vec<Vec<Entry>> = vec![Vec::new(); n];
    for (i, &v) in vs.iter().enumerate() {
        est[v].push(Entry { virt: i as u32, dist: 0, parent: v, w: 0 });
    }
    let mut live = vs.len();
    meter.alloc(live);
    for _ in 0..g {
        let mut next = est.clone();
        meter.alloc(live);
        let mut overflow = None;
        stream.pass(&mut |a| {
            for e in &est[a.u] {
                let cand = e.dist + a.w;
                let list = &mut next[a.v];
                match list.binary_search_by_key(&e.virt, |x| x.virt) {
                    Ok(i) if cand < list[i].dist => list[i] = Entry { dist: cand, parent: a.u, w: a.w, ..*e },
                    Ok(_) => {}
                    Err(i) => {
                        list.insert(i, Entry { virt: e.virt, dist: cand, parent: a.u, w: a.w });
                        if list.len() > cap {
                            overflow = Some(a.v);
                        }
                    }
                }
            }
        })?;
        if let Some(v) = overflow {
            return Ok(Attempt::Retry(format!("vertex {v} holds more than {cap} estimates")));
        }
        let grown: usize = next.iter().map(Vec::len).sum();
        meter.alloc(grown - live);
        meter.free(live);
        live = grown;
        est = next;
    }
    let snapshot = est;

    // Offline: the virtual digraph and its distances from every source.
    let arcs: Vec<(usize, usize, Weight)> = vs
        .iter()
        .enumerate()
        .flat_map(|(j, &v)| {
            snapshot[v].iter().filter(move |e| e.virt as usize != j).map(move |e| (e.virt as usize, j, e.dist))
        })
        .collect();
    meter.alloc(arcs.len());
    let mut witness = None;
    let mut virt_dist = Vec::with_capacity(s);
    let mut virt_parent = Vec::with_capacity(s);
    for &r in sources {
        let (d, p, cyc) = virtual_bf(vs.len(), &arcs, index[r] as usize);
        if witness.is_none() {
            if let Some(c) = cyc {
                witness = Some(unfold_cycle(&c, &vs, &snapshot));
            }
        }
        virt_dist.push(d);
        virt_parent.push(p);
    }
    meter.alloc(2 * s * vs.len());

    // Combined distances and, per vertex, the virtual realizing them.
    let mut dist = vec![vec![Distance::INFINITY; n]; s];
    let mut via = vec![vec![u32::MAX; n]; s];
    meter.alloc(2 * n * s);
    for si in 0..s {
        for v in 0..n {
            for e in &snapshot[v] {
                let dv = virt_dist[si][e.virt as usize];
                if dv.is_finite() && dv.add_weight(e.dist) < dist[si][v] {
                    dist[si][v] = dv.add_weight(e.dist);
                    via[si][v] = e.virt;
                }
            }
        }
    }

    // Passes Γ+1..=2Γ: any further drop means a negative cycle.
    let mut cur = dist.clone();
    meter.alloc(n * s);
    let mut dropped = false;
    for _ in 0..g {
        stream.pass(&mut |a| {
            for c in cur.iter_mut() {
                if c[a.u].is_finite() && c[a.u].add_weight(a.w) < c[a.v] {
                    c[a.v] = c[a.u].add_weight(a.w);
                    dropped = true;
                }
            }
        })?;
    }
    let ledger = |meter: &WordMeter, stream: &dyn EdgeStream| PassLedger {
        passes: stream.pass_count() - start,
        peak_words: meter.peak(),
    };

    let detected = dropped || witness.is_some();
    if detected {
        let witness = witness.flatten();
        let note = witness.is_none().then(|| "detected by an estimate that kept dropping; no witness".to_string());
        return Ok(Attempt::Done(DirectedStreamResult {
            rows: Vec::new(),
            cycle: CycleReport { detected, witness, note },
            ledger: ledger(&meter, stream),
            gamma: g,
            virtuals: vs.len(),
            seed,
            retries: 0,
        }));
    }

    let mut rows = Vec::with_capacity(s);
    for (si, &r) in sources.iter().enumerate() {
        let Some(parent) = tree_from_paths(n, r, &dist[si], &via[si], &virt_parent[si], &vs, &snapshot, &mut meter)
        else {
            return Ok(Attempt::Retry(format!("paths from source {r} did not unfold")));
        };
        rows.push(StreamSpt { source: r, dist: std::mem::take(&mut dist[si]), parent });
    }
    Ok(Attempt::Done(DirectedStreamResult {
        rows,
        cycle: CycleReport::default(),
        ledger: ledger(&meter, stream),
        gamma: g,
        virtuals: vs.len(),
        seed,
        retries: 0,
    }))
}

/// Bellman-Ford over the virtual digraph from `r`. The third value is a
/// negative cycle (as virtual indices in arc order) when one is reachable.
fn virtual_bf(
    nv: usize,
    arcs: &[(usize, usize, Weight)],
    r: usize,
) -> (Vec<Distance>, Vec<Option<usize>>, Option<Vec<usize>>) {
    let mut d = vec![Distance::INFINITY; nv];
    let mut p = vec![None; nv];
    d[r] = Distance::ZERO;
    let mut last = None;
    for _ in 0..nv {
        last = None;
        for &(u, v, w) in arcs {
            if d[u].is_finite() && d[u].add_weight(w) < d[v] {
                d[v] = d[u].add_weight(w);
                p[v] = Some(u);
                last = Some(v);
            }
        }
        if last.is_none() {
            return (d, p, None);
        }
    }
    // Still relaxing after nv rounds: walk back nv steps to land on the cycle.
    let mut x = last.expect("relaxed in the last round");
    for _ in 0..nv {
        x = p[x].expect("relaxed vertices have parents");
    }
    let mut cycle = vec![x];
    let mut y = p[x].expect("on the cycle");
    while y != x {
        cycle.push(y);
        y = p[y].expect("on the cycle");
    }
    cycle.reverse();
    (d, p, Some(cycle))
}

/// The `G`-walk behind virtual arc `from -> at`, as vertices from `from` to
/// `at`, following the snapshot's in-arc parents. `None` if the parents loop.
fn unfold_arc(from: u32, at: VertexId, vs: &[VertexId], snapshot: &[Vec<Entry>]) -> Option<Vec<VertexId>> {
    let origin = vs[from as usize];
    let mut walk = vec![at];
    let mut x = at;
    while x != origin {
        let e = snapshot[x][snapshot[x].binary_search_by_key(&from, |e| e.virt).ok()?];
        x = e.parent;
        walk.push(x);
        if walk.len() > snapshot.len() + 1 {
            return None;
        }
    }
    walk.reverse();
    Some(walk)
}

fn unfold_cycle(cycle: &[usize], vs: &[VertexId], snapshot: &[Vec<Entry>]) -> Option<Vec<VertexId>> {
    let mut walk = vec![vs[cycle[0]]];
    for i in 0..cycle.len() {
        let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
        let seg = unfold_arc(a as u32, vs[b], vs, snapshot)?;
        walk.extend_from_slice(&seg[1..]);
    }
    Some(walk)
}

/// Collects the unfolded path of every reached vertex into a subgraph `T'`
/// and returns a shortest-path tree of `T'` from `r`, preferring fewer hops
/// among equal distances. `None` if a path fails to unfold or `T'` does not
/// reproduce `dist`.
#[allow(clippy::too_many_arguments)]
fn tree_from_paths(
    n: usize,
    r: VertexId,
    dist: &[Distance],
    via: &[u32],
    virt_parent: &[Option<usize>],
    vs: &[VertexId],
    snapshot: &[Vec<Entry>],
    meter: &mut WordMeter,
) -> Option<Vec<Option<VertexId>>> {
    let mut arcs: HashSet<(VertexId, VertexId)> = HashSet::new();
    let add_walk = |walk: &[VertexId], arcs: &mut HashSet<(VertexId, VertexId)>| {
        for w in walk.windows(2) {
            arcs.insert((w[0], w[1]));
        }
    };
    let mut virt_done = vec![false; vs.len()];
    for v in 0..n {
        if dist[v].is_infinite() {
            continue;
        }
        let mut j = via[v] as usize;
        add_walk(&unfold_arc(j as u32, v, vs, snapshot)?, &mut arcs);
        while !virt_done[j] {
            virt_done[j] = true;
            let Some(i) = virt_parent[j] else { break };
            add_walk(&unfold_arc(i as u32, vs[j], vs, snapshot)?, &mut arcs);
            j = i;
        }
    }
    let weight = |x: VertexId, y: VertexId| snapshot[y].iter().filter(|e| e.parent == x).map(|e| e.w).min();
    let mut adj: Vec<Vec<(VertexId, Weight)>> = vec![Vec::new(); n];
    for &(x, y) in &arcs {
        adj[x].push((y, weight(x, y)?));
    }
    meter.alloc(arcs.len() + 2 * n);
    // Bellman-Ford on T' with (distance, hops) labels.
    let mut best = vec![PathLen::INFINITY; n];
    let mut parent = vec![None; n];
    best[r] = PathLen::ZERO;
    for _ in 0..n {
        let mut changed = false;
        for x in 0..n {
            if !best[x].is_finite() {
                continue;
            }
            for &(y, w) in &adj[x] {
                let cand = best[x].step(w);
                if cand < best[y] {
                    best[y] = cand;
                    parent[y] = Some(x);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    meter.free(arcs.len() + 2 * n);
    (0..n).all(|v| best[v].dist == dist[v]).then_some(parent)
}
