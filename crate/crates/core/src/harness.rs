//! Experiment plumbing: graph sources, result rows, CSV output and scaling
//! sweeps.
//!
//! CSV columns, in order: `n, m, D_rt, regime, q, k, s, b, seed, retries,
//! rounds, messages, passes, peak_words, verified, wall_ms`. Distributed rows
//! leave `passes` and `peak_words` at 0; streaming rows leave `D_rt`,
//! `rounds` and `messages` at 0 and use `q = |V'|/n` for the directed case.
//! Every field except `wall_ms` is a deterministic function of the config.

use std::fmt;
use std::fs::OpenOptions;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::distance::{VertexId, Weight};
use crate::error::{GraphError, SsspError, StreamError};
use crate::graph::{gen_digraph, gen_graph, load_graph, AnyGraph, GraphKind, GraphMode};
use crate::sssp::{run_sssp, MultiSourceResult, SptResult, SsspConfig};
use crate::stream::{stream_sssp, DirectedStreamResult, MemoryStream, StreamResult};

/// A generated graph: `path:N`, `cycle:N`, `star:N` (unit weights, or
/// `kind:N:W` for weight `W`), `random:N:M[:LO:HI]` (default weights
/// `0..=100`) or `digraph:N:M[:LO:HI]` (directed, default `0..=100`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GenSpec {
    Fixed { kind: String, n: usize, w: Weight },
    Random { n: usize, m: usize, lo: Weight, hi: Weight },
    Digraph { n: usize, m: usize, lo: Weight, hi: Weight },
}

impl GenSpec {
    pub fn generate(&self, seed: u64) -> Result<AnyGraph, GraphError> {
        Ok(match self {
            GenSpec::Fixed { kind, n, w } => {
                let kind = match kind.as_str() {
                    "path" => GraphKind::Path,
                    "cycle" => GraphKind::Cycle,
                    _ => GraphKind::Star,
                };
                let m = kind.implied_m(*n).unwrap_or(0);
                AnyGraph::Undirected(gen_graph(kind, *n, m, (*w, *w), seed)?)
            }
            GenSpec::Random { n, m, lo, hi } => {
                AnyGraph::Undirected(gen_graph(GraphKind::Random, *n, *m, (*lo, *hi), seed)?)
            }
            GenSpec::Digraph { n, m, lo, hi } => AnyGraph::Directed(gen_digraph(*n, *m, (*lo, *hi), seed)?),
        })
    }
}

impl FromStr for GenSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |i: usize| -> Result<i64, String> {
            parts[i].parse().map_err(|_| format!("`{}` in generator spec `{s}` is not a number", parts[i]))
        };
        let size = |i: usize| -> Result<usize, String> {
            parts[i].parse().map_err(|_| format!("`{}` in generator spec `{s}` is not a size", parts[i]))
        };
        match (parts[0], parts.len()) {
            ("path" | "cycle" | "star", 2) => Ok(GenSpec::Fixed { kind: parts[0].into(), n: size(1)?, w: 1 }),
            ("path" | "cycle" | "star", 3) => Ok(GenSpec::Fixed { kind: parts[0].into(), n: size(1)?, w: num(2)? }),
            ("random", 3) => Ok(GenSpec::Random { n: size(1)?, m: size(2)?, lo: 0, hi: 100 }),
            ("random", 5) => Ok(GenSpec::Random { n: size(1)?, m: size(2)?, lo: num(3)?, hi: num(4)? }),
            ("digraph", 3) => Ok(GenSpec::Digraph { n: size(1)?, m: size(2)?, lo: 0, hi: 100 }),
            ("digraph", 5) => Ok(GenSpec::Digraph { n: size(1)?, m: size(2)?, lo: num(3)?, hi: num(4)? }),
            _ => Err(format!(
                "unknown generator spec `{s}`; expected path:N, cycle:N, star:N, random:N:M[:LO:HI] or digraph:N:M[:LO:HI]"
            )),
        }
    }
}

impl fmt::Display for GenSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenSpec::Fixed { kind, n, w } => write!(f, "{kind}:{n}:{w}"),
            GenSpec::Random { n, m, lo, hi } => write!(f, "random:{n}:{m}:{lo}:{hi}"),
            GenSpec::Digraph { n, m, lo, hi } => write!(f, "digraph:{n}:{m}:{lo}:{hi}"),
        }
    }
}

/// Where the input graph comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GraphSource {
    File(PathBuf),
    Gen(GenSpec),
}

impl GraphSource {
    /// Loads or generates the graph. Files are read in `mode`; generators
    /// decide their own direction.
    pub fn load(&self, mode: GraphMode, seed: u64) -> Result<AnyGraph, GraphError> {
        match self {
            GraphSource::File(p) => load_graph(p, mode),
            GraphSource::Gen(spec) => spec.generate(seed),
        }
    }
}

/// How the virtual set is chosen on the command line.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub enum QSpec {
    /// From the parameter regime.
    #[default]
    Auto,
    Fixed(f64),
    /// An explicit virtual set; for deterministic tests only.
    Forced(Vec<VertexId>),
}

impl FromStr for QSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(QSpec::Auto);
        }
        if let Some(list) = s.strip_prefix("forced:") {
            return list
                .split(',')
                .filter(|x| !x.is_empty())
                .map(|x| x.trim().parse().map_err(|_| format!("`{x}` is not a vertex id")))
                .collect::<Result<_, _>>()
                .map(QSpec::Forced);
        }
        match s.parse::<f64>() {
            Ok(q) if q > 0.0 && q <= 1.0 => Ok(QSpec::Fixed(q)),
            _ => Err(format!("q must be `auto`, a probability in (0, 1] or `forced:a,b,c`, not `{s}`")),
        }
    }
}

/// One command's full configuration. Together with the crate version it
/// determines every output except wall-clock times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    pub sources: Vec<VertexId>,
    pub q: QSpec,
    pub k: Option<usize>,
    pub b: usize,
    pub seed: u64,
    pub retry_cap: u32,
    pub verify: bool,
    pub json_out: Option<PathBuf>,
    pub csv_out: Option<PathBuf>,
}

/// One CSV line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "D_rt")]
    pub d_rt: u32,
    pub regime: String,
    pub q: f64,
    pub k: usize,
    pub s: usize,
    pub b: usize,
    pub seed: u64,
    pub retries: u32,
    pub rounds: u64,
    pub messages: u64,
    pub passes: u64,
    pub peak_words: u64,
    pub verified: bool,
    pub wall_ms: u64,
}

pub const CSV_COLUMNS: [&str; 16] = [
    "n",
    "m",
    "D_rt",
    "regime",
    "q",
    "k",
    "s",
    "b",
    "seed",
    "retries",
    "rounds",
    "messages",
    "passes",
    "peak_words",
    "verified",
    "wall_ms",
];

impl ResultRow {
    /// A distributed single-source run.
    pub fn from_sssp(m: usize, r: &SptResult, b: usize, verified: bool, wall_ms: u64) -> Self {
        let total = r.ledger.total();
        ResultRow {
            n: r.dist.len(),
            m,
            d_rt: r.run.d_rt,
            regime: r.regime.clone(),
            q: r.params.q,
            k: r.run.k,
            s: 1,
            b,
            seed: r.seed,
            retries: r.retries,
            rounds: total.rounds,
            messages: total.messages,
            passes: 0,
            peak_words: 0,
            verified,
            wall_ms,
        }
    }

    /// A distributed multi-source run. Parameters are those of the first row.
    pub fn from_multi(m: usize, r: &MultiSourceResult, b: usize, verified: bool, wall_ms: u64) -> Self {
        let first = &r.rows[0];
        let total = r.ledger.total();
        ResultRow {
            s: r.rows.len(),
            retries: r.retries,
            rounds: total.rounds,
            messages: total.messages,
            ..ResultRow::from_sssp(m, first, b, verified, wall_ms)
        }
    }

    pub fn from_stream(n: usize, m: usize, r: &StreamResult, verified: bool, wall_ms: u64) -> Self {
        ResultRow {
            n,
            m,
            d_rt: 0,
            regime: "stream".into(),
            q: 1.0,
            k: r.k,
            s: r.rows.len(),
            b: 1,
            seed: 0,
            retries: 0,
            rounds: 0,
            messages: 0,
            passes: r.ledger.passes,
            peak_words: r.ledger.peak_words,
            verified,
            wall_ms,
        }
    }

    pub fn from_directed_stream(
        n: usize,
        m: usize,
        k: usize,
        s: usize,
        r: &DirectedStreamResult,
        verified: bool,
        wall_ms: u64,
    ) -> Self {
        ResultRow {
            n,
            m,
            d_rt: 0,
            regime: if r.cycle.detected { "dstream:negative-cycle" } else { "dstream" }.into(),
            q: r.virtuals as f64 / n.max(1) as f64,
            k,
            s,
            b: 1,
            seed: r.seed,
            retries: r.retries,
            rounds: 0,
            messages: 0,
            passes: r.ledger.passes,
            peak_words: r.ledger.peak_words,
            verified,
            wall_ms,
        }
    }
}

/// Appends rows to a CSV file, writing the header when the file is new or
/// empty. Shared writers serialize appends through the lock.
#[derive(Debug)]
pub struct CsvSink {
    path: PathBuf,
    lock: Mutex<()>,
}

impl CsvSink {
    pub fn new(path: impl AsRef<Path>) -> Self {
        CsvSink { path: path.as_ref().to_path_buf(), lock: Mutex::new(()) }
    }

    pub fn append(&self, row: &ResultRow) -> Result<(), csv::Error> {
        let _guard = self.lock.lock().unwrap_or_else(|e| e.into_inner());
        let file = OpenOptions::new().create(true).append(true).open(&self.path)?;
        let empty = file.metadata()?.len() == 0;
        let mut w = csv::WriterBuilder::new().has_headers(empty).from_writer(file);
        w.serialize(row)?;
        w.flush()?;
        Ok(())
    }
}

/// What a scaling sweep runs per instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepMode {
    /// Distributed single source, regime-selected parameters.
    Sssp,
    /// Undirected streaming with this `k`, or `ceil(sqrt n)`.
    Stream { k: Option<usize> },
}

/// Settings shared by every instance of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Edges per vertex of the random graphs.
    pub density: usize,
    pub weights: (Weight, Weight),
    pub b: usize,
    pub base_seed: u64,
    pub retry_cap: u32,
    /// Run trials of one size on separate threads.
    pub parallel: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { density: 4, weights: (1, 100), b: 1, base_seed: 0, retry_cap: 5, parallel: true }
    }
}

/// Per-size means over verified rows. `cost` is rounds in distributed mode
/// and passes in streaming mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub n: usize,
    pub trials: usize,
    pub mean_cost: f64,
    /// `mean_cost / n`.
    pub per_vertex: f64,
    /// `mean_cost / (n ln n)^(5/6)`.
    pub ratio_to_bound: f64,
}

/// `cost ~ C (n ln n)^(5/6)`, with `C` minimizing the largest relative
/// residual.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub c: f64,
    pub max_rel_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub mode: SweepMode,
    pub rows: Vec<ResultRow>,
    pub sizes: Vec<SizeSummary>,
    /// Rows that failed verification and were left out of the means.
    pub excluded: usize,
    pub fit: Option<Fit>,
}

impl SweepReport {
    /// Whether `cost / n` strictly decreases from each size to the next.
    pub fn strictly_sublinear(&self) -> bool {
        self.sizes.windows(2).all(|w| w[1].per_vertex < w[0].per_vertex)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("sizes must be increasing and nonempty, trials at least 3")]
    BadGrid,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sssp(#[from] SsspError),
    #[error(transparent)]
    Stream(#[from] StreamError),
}

pub fn bound_5_6(n: usize) -> f64 {
    let n = n.max(2) as f64;
    (n * n.ln()).powf(5.0 / 6.0)
}

/// Chebyshev fit of `y ~ C x`: with ratios `y/x` in `[lo, hi]`, the best `C`
/// is `(lo + hi) / 2` and the residual `(hi - lo) / (hi + lo)`.
pub fn fit_constant(points: &[(f64, f64)]) -> Option<Fit> {
    let ratios: Vec<f64> = points.iter().map(|&(x, y)| y / x).collect();
    let lo = ratios.iter().copied().reduce(f64::min)?;
    let hi = ratios.iter().copied().reduce(f64::max)?;
    let c = (lo + hi) / 2.0;
    let max_rel_residual = ratios.iter().map(|r| (r - c).abs() / c).fold(0.0, f64::max);
    Some(Fit { c, max_rel_residual })
}

/// Runs `trials` verified instances per size on random graphs with
/// `density * n` edges (hop diameter `O(log n)`), and summarizes them.
pub fn scaling_sweep(
    sizes: &[usize],
    trials: usize,
    mode: SweepMode,
    fixed: &SweepConfig,
    sink: Option<&CsvSink>,
) -> Result<SweepReport, SweepError> {
    if sizes.is_empty() || trials < 3 || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SweepError::BadGrid);
    }
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    let mut excluded = 0;
    for &n in sizes {
        let run = |t: usize| sweep_instance(n, t, mode, fixed);
        let results: Vec<Result<ResultRow, SweepError>> = if fixed.parallel {
            std::thread::scope(|sc| {
                let handles: Vec<_> = (0..trials).map(|t| sc.spawn(move || run(t))).collect();
                handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
            })
        } else {
            (0..trials).map(run).collect()
        };
        let mut verified = Vec::new();
        for r in results {
            let row = match r {
                Ok(row) => row,
                Err(SweepError::Sssp(SsspError::ProbabilisticFailure { .. })) => {
                    excluded += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            if let Some(s) = sink {
                s.append(&row).map_err(|e| GraphError::InvalidSpec(format!("csv: {e}")))?;
            }
            if row.verified {
                verified.push(row.clone());
            } else {
                excluded += 1;
            }
            rows.push(row);
        }
        if verified.is_empty() {
            continue;
        }
        let cost = |r: &ResultRow| match mode {
            SweepMode::Sssp => r.rounds as f64,
            SweepMode::Stream { .. } => r.passes as f64,
        };
        let mean_cost = verified.iter().map(cost).sum::<f64>() / verified.len() as f64;
        summaries.push(SizeSummary {
            n,
            trials: verified.len(),
            mean_cost,
            per_vertex: mean_cost / n as f64,
            ratio_to_bound: mean_cost / bound_5_6(n),
        });
    }
    let points: Vec<(f64, f64)> = summaries.iter().map(|s| (bound_5_6(s.n), s.mean_cost)).collect();
    let fit = fit_constant(&points);
    Ok(SweepReport { mode, rows, sizes: summaries, excluded, fit })
}

fn sweep_instance(n: usize, trial: usize, mode: SweepMode, fixed: &SweepConfig) -> Result<ResultRow, SweepError> {
    let seed = fixed.base_seed + trial as u64;
    let m = (fixed.density * n).min(n * (n - 1) / 2).max(n - 1);
    let g = gen_graph(GraphKind::Random, n, m, fixed.weights, seed)?;
    let start = Instant::now();
    match mode {
        SweepMode::Sssp => {
            let cfg = SsspConfig { b: fixed.b, seed, retry_cap: fixed.retry_cap, ..SsspConfig::default() };
            let r = run_sssp(&g, 0, &cfg)?;
            Ok(ResultRow::from_sssp(m, &r, fixed.b, true, start.elapsed().as_millis() as u64))
        }
        SweepMode::Stream { k } => {
            let k = k.unwrap_or((n as f64).sqrt().ceil() as usize);
            let r = stream_sssp(&mut MemoryStream::undirected(&g), 0, k)?;
            let ok = r.rows[0].dist == crate::oracle::dijkstra(&g, 0);
            let mut row = ResultRow::from_stream(n, m, &r, ok, start.elapsed().as_millis() as u64);
            row.seed = seed;
            Ok(row)
        }
    }
}
