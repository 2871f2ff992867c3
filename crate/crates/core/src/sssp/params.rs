//! Choice of the sampling probability `q` and hopset parameter `k`.
//!
//! Every regime analysed for the algorithm is a candidate with its own
//! `(q, k)` and validity conditions. Among the valid candidates the one with
//! the smallest predicted running time wins (ties go to the earlier entry).
//! The prediction is the total-time expression with all constants set to 1:
//!
//! `T = (L/q) k ceil(k/b) + D + nqk/b + (D + nqs/b + (L/q) ceil(s/b)) nq/k`
//!
//! with `L = ln n`.

use serde::{Deserialize, Serialize};

use crate::hopset::{hop_limit, hopset_depth, DEFAULT_C};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamChoice {
    pub q: f64,
    pub k: usize,
    /// Hop limit between consecutive virtuals, with the default constant.
    pub hop_limit: usize,
    /// Super-rounds of the hopset construction, with the default constant.
    pub depth: usize,
    pub regime: String,
    /// Source batches run one after another.
    pub batches: usize,
    pub predicted_rounds: f64,
    /// Set when no regime's conditions hold and the closest one was used.
    pub note: Option<String>,
}

impl ParamChoice {
    /// A fixed `(q, k)` not coming from the regime table.
    pub fn fixed(n: usize, q: f64, k: usize, regime: &str) -> Self {
        let q = q.clamp(f64::MIN_POSITIVE, 1.0);
        ParamChoice {
            q,
            k: k.max(1),
            hop_limit: hop_limit(n, q, DEFAULT_C),
            depth: hopset_depth(n, q, k.max(1), DEFAULT_C),
            regime: regime.to_string(),
            batches: 1,
            predicted_rounds: f64::NAN,
            note: None,
        }
    }
}

struct Ctx {
    n: f64,
    d: f64,
    s: f64,
    b: f64,
    l: f64,
    /// `n ln n`.
    nl: f64,
}

impl Ctx {
    fn predicted(&self, q: f64, k: f64, s: f64) -> f64 {
        let (n, d, b, l) = (self.n, self.d, self.b, self.l);
        let nq = n * q;
        (l / q) * k * (k / b).ceil() + d + nq * k / b + (d + nq * s / b + (l / q) * (s / b).ceil()) * nq / k
    }

    /// The per-iteration load at `q` clamped into `[s/n, 1]`.
    fn load(&self, q: f64) -> f64 {
        let q = q.min(1.0).max(self.s / self.n);
        ((self.n * q * self.s / self.b).ceil()).max((self.l / q) * (self.s / self.b).ceil())
    }

    /// The diameter term does not dominate one skeleton iteration.
    fn small_d(&self, q: f64) -> bool {
        self.d <= self.load(q) * (1.0 + 1e-9)
    }

    fn large_d(&self, q: f64) -> bool {
        self.d * (1.0 + 1e-9) >= self.load(q)
    }
}

struct Candidate {
    name: &'static str,
    q: f64,
    k: f64,
    valid: bool,
}

fn candidates(c: &Ctx) -> Vec<Candidate> {
    let (n, d, s, b, l, nl) = (c.n, c.d, c.s, c.b, c.l, c.nl);
    let single = s == 1.0;
    let unit = b == 1.0;
    let mut out = Vec::new();
    let mut push = |name, q: f64, k: f64, cond: bool| out.push(Candidate { name, q, k, valid: cond });

    let q = (l / n).sqrt();
    push("single-source small-D", q, nl.powf(1.0 / 6.0), single && unit && c.small_d(q));
    let q = l / d;
    push("single-source large-D", q, (nl / d).cbrt(), single && unit && c.large_d(q));
    let q = (l / n).sqrt();
    let k = nl.powf(1.0 / 6.0) * s.cbrt();
    push("multi-source small-D", q, k, !single && unit && s <= n * q && c.small_d(q));
    let q = s * l / d;
    let k = (nl / d).cbrt() * s.powf(2.0 / 3.0);
    push("multi-source large-D", q, k, !single && unit && q <= 1.0 && c.large_d(q));
    let q = s / n;
    push("many-source", q, s.powf(4.0 / 3.0) / nl.cbrt(), unit && s >= nl.sqrt());

    let q = (b * l / n).sqrt();
    let k = nl.powf(1.0 / 6.0) * b.sqrt();
    push("bandwidth small-b small-D", q, k, single && !unit && b <= nl.cbrt() && c.small_d(q));
    let k = (nl * b).powf(0.25);
    push("bandwidth large-b small-D", q, k, single && !unit && b >= nl.cbrt() && c.small_d(q));
    let q = l / d;
    let k = (nl * b / d).cbrt();
    push("bandwidth large-D", q, k, single && !unit && b <= k && b <= nl.cbrt() && c.large_d(q));

    let q = (b * l / (n * s)).sqrt();
    let k = nl.powf(1.0 / 6.0) * b.sqrt() / s.powf(1.0 / 6.0);
    push("bandwidth case 1 small-D", q, k, !unit && s <= b && b <= k && c.small_d(q));
    let q = l / d;
    let k = (nl * b / d).cbrt();
    push("bandwidth case 1 large-D", q, k, !unit && s <= b && b <= k && c.large_d(q));
    let q = (l / n).sqrt();
    let k = nl.powf(1.0 / 6.0) * s.cbrt();
    push("bandwidth case 2 small-D", q, k, !unit && b <= s && b <= k && c.small_d(q));
    let q = s * l / (d * b);
    let k = (nl / (d * b)).cbrt() * s.powf(2.0 / 3.0);
    push("bandwidth case 2 large-D", q, k, !unit && b <= s && b <= k && k <= n * q && q <= 1.0 && c.large_d(q));
    let q = (l / n).sqrt();
    let k = d.sqrt();
    push("bandwidth case 2 large-D wide", q, k, !unit && s >= b && b >= k && c.large_d(q));
    let q = (b * l / (n * s)).sqrt();
    let k = (nl * b / s).powf(0.25);
    push("bandwidth case 3 small-D", q, k, !unit && b >= s && b >= k && c.small_d(q));
    let k = (d * b / s).sqrt();
    push("bandwidth case 3 large-D", q, k, !unit && b >= s && b >= k && b * s >= d && c.large_d(q));
    let q = b * (l / (d * n)).sqrt();
    push("bandwidth case 3 large-D wide", q, b, !unit && d >= b && b >= s && q <= 1.0 && c.large_d(q));
    out
}

/// Clamps `q` into `[s/n, 1]` and `k` into `[1, max(1, floor(nq))]`.
fn clamp(n: f64, s: f64, q: f64, k: f64) -> (f64, usize) {
    let q = q.min(1.0).max(s / n).max(f64::MIN_POSITIVE);
    let cap = (n * q).floor().max(1.0);
    (q, (k.ceil().max(1.0).min(cap)) as usize)
}

/// Parameters for `n` vertices, diameter estimate `d`, `s` sources and
/// bandwidth `b`. Total: inputs outside every regime get the candidate with
/// the best predicted time and a note saying so.
pub fn choose_params(n: usize, d: usize, s: usize, b: usize) -> ParamChoice {
    assert!(n >= 1 && s >= 1 && b >= 1);
    let nf = (n.max(2)) as f64;
    let l = nf.ln();
    let nl = nf * l;
    let batch_size = nl.sqrt().ceil() as usize;
    let batches = if s > batch_size { s.div_ceil(batch_size) } else { 1 };
    let per_batch = s.div_ceil(batches);
    let ctx = Ctx { n: nf, d: d.max(1) as f64, s: per_batch as f64, b: b as f64, l, nl };

    let scored: Vec<(bool, f64, &'static str, f64, usize)> = candidates(&ctx)
        .into_iter()
        .map(|c| {
            let (q, k) = clamp(nf, ctx.s, c.q, c.k);
            (c.valid, ctx.predicted(q, k as f64, ctx.s) * batches as f64, c.name, q, k)
        })
        .collect();
    let best = |valid_only: bool| {
        scored.iter().filter(|c| c.0 || !valid_only).fold(None::<&(bool, f64, &str, f64, usize)>, |acc, c| match acc {
            Some(a) if a.1 <= c.1 => Some(a),
            _ => Some(c),
        })
    };
    let (note, pick) = match best(true) {
        Some(p) => (None, p),
        None => {
            let p = best(false).expect("candidate list is never empty");
            let note = format!("no regime's conditions hold for n={n} D={d} s={s} b={b}; using {}", p.2);
            log::info!("{note}");
            (Some(note), p)
        }
    };
    let &(_, predicted, name, q, k) = pick;
    let regime = if batches > 1 { format!("partitioned ({batches} batches): {name}") } else { name.to_string() };
    ParamChoice {
        q,
        k,
        hop_limit: hop_limit(n, q, DEFAULT_C),
        depth: hopset_depth(n, q, k, DEFAULT_C),
        regime,
        batches,
        predicted_rounds: predicted,
        note,
    }
}
