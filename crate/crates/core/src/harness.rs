//! Experiment drivers with deterministic per-trial random streams and CSV
//! output.
//!
//! Every trial draws from its own ChaCha stream keyed by the master seed, a
//! cell identifier derived from the cell's parameters, and the trial index,
//! so results do not depend on how work is scheduled across threads. Rows are
//! emitted in lexicographic parameter order.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::{
    hamming_ball_size, periodic_cost, pi_exact, pi_lower, pi_upper, redundancy_exponent,
};
use crate::channels::{observe, substitution_set, NoiseKind, NoiseMode};
use crate::codec::{build_code, build_inner_lexicode, decode};
use crate::error::{Error, Result};
use crate::generator::{enumerate_rrf, redundancy, Certifier, CosetStrategy, Method};
use crate::repeatfree::{is_rrf_sub_sufficient, saturating_u128, WorkBudget};
use crate::strings::{check_q, derive_params, RingString};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    Pi,
    Redundancy,
    Roundtrip,
    RateTrend,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Pi => "pi",
            ExperimentKind::Redundancy => "redundancy",
            ExperimentKind::Roundtrip => "roundtrip",
            ExperimentKind::RateTrend => "rate-trend",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pi" => Ok(ExperimentKind::Pi),
            "redundancy" => Ok(ExperimentKind::Redundancy),
            "roundtrip" => Ok(ExperimentKind::Roundtrip),
            "rate-trend" => Ok(ExperimentKind::RateTrend),
            other => Err(Error::arg(format!("unknown experiment kind {other:?}"))),
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn noise_name(noise: NoiseKind) -> &'static str {
    match noise {
        NoiseKind::Substitution => "substitution",
        NoiseKind::Deletion => "deletion",
    }
}

/// Parameter ranges; the cells of an experiment are the Cartesian product of
/// the ranges it uses. An empty `k` means every `0 < k <= s`; an empty
/// `noise` means substitution only.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamGrid {
    pub q: Vec<u32>,
    pub n: Vec<usize>,
    pub a: Vec<f64>,
    pub delta: Vec<f64>,
    pub s: Vec<usize>,
    pub t: Vec<usize>,
    pub k: Vec<usize>,
    pub d_min: Vec<usize>,
    pub noise: Vec<NoiseKind>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub grid: ParamGrid,
    pub trials: u64,
    pub seed: u64,
    pub budget: WorkBudget,
    /// Membership certificate for the roundtrip codec.
    pub certifier: Certifier,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind, grid: ParamGrid) -> Self {
        ExperimentSpec {
            kind,
            grid,
            trials: 1000,
            seed: 0,
            budget: WorkBudget::DEFAULT,
            certifier: Certifier::Sufficient,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::arg("trials must be at least 1"));
        }
        let g = &self.grid;
        let required: &[(&str, bool)] = match self.kind {
            ExperimentKind::Pi => &[
                ("q", g.q.is_empty()),
                ("s", g.s.is_empty()),
                ("t", g.t.is_empty()),
            ],
            ExperimentKind::Redundancy => &[
                ("q", g.q.is_empty()),
                ("n", g.n.is_empty()),
                ("s", g.s.is_empty()),
                ("t", g.t.is_empty()),
            ],
            ExperimentKind::Roundtrip => &[
                ("q", g.q.is_empty()),
                ("n", g.n.is_empty()),
                ("s", g.s.is_empty()),
                ("d_min", g.d_min.is_empty()),
            ],
            ExperimentKind::RateTrend => &[
                ("q", g.q.is_empty()),
                ("n", g.n.is_empty()),
                ("a", g.a.is_empty()),
                ("delta", g.delta.is_empty()),
            ],
        };
        if let Some((name, _)) = required.iter().find(|(_, empty)| *empty) {
            return Err(Error::arg(format!(
                "{} experiment needs a non-empty {name} range",
                self.kind
            )));
        }
        for &q in &g.q {
            check_q(q)?;
        }
        Ok(())
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Identifier of a parameter cell, folded from its fields.
pub fn cell_id(fields: &[u64]) -> u64 {
    fields
        .iter()
        .fold(fields.len() as u64, |acc, &f| splitmix(acc ^ splitmix(f)))
}

/// The random stream for one trial of one cell.
pub fn stream_rng(master: u64, cell: u64, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master.to_le_bytes());
    key[8..16].copy_from_slice(&cell.to_le_bytes());
    key[16..24].copy_from_slice(&trial.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

fn uniform_symbols<R: Rng>(rng: &mut R, q: u32, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.random_range(0..q) as u8).collect()
}

/// A CSV-serializable experiment row.
pub trait CsvRow {
    const HEADER: &'static [&'static str];
    fn record(&self) -> Vec<String>;
}

pub fn write_csv<W: Write, R: CsvRow>(out: W, rows: &[R]) -> Result<()> {
    let io = |e: csv::Error| Error::Invariant(format!("csv output failed: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(R::HEADER).map_err(io)?;
    for row in rows {
        w.write_record(row.record()).map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::Invariant(format!("csv output failed: {e}")))
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

#[derive(Clone, Debug, PartialEq)]
pub enum McEstimate {
    Value(f64),
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PiRow {
    pub q: u32,
    pub s: usize,
    pub t: usize,
    pub k: usize,
    pub exact: BigRational,
    pub lower: BigRational,
    pub upper: BigRational,
    pub mc: McEstimate,
    pub mc_trials: u64,
    pub seed: u64,
}

impl PiRow {
    pub fn sandwich_holds(&self) -> bool {
        self.lower <= self.exact && self.exact <= self.upper
    }
}

impl CsvRow for PiRow {
    const HEADER: &'static [&'static str] = &[
        "q",
        "s",
        "t",
        "k",
        "pi_num",
        "pi_den",
        "lower_num",
        "lower_den",
        "upper_num",
        "upper_den",
        "mc_estimate",
        "mc_trials",
        "seed",
    ];

    fn record(&self) -> Vec<String> {
        let mc = match self.mc {
            McEstimate::Value(v) => v.to_string(),
            McEstimate::BudgetExceeded => "budget_exceeded".to_string(),
        };
        vec![
            self.q.to_string(),
            self.s.to_string(),
            self.t.to_string(),
            self.k.to_string(),
            self.exact.numer().to_string(),
            self.exact.denom().to_string(),
            self.lower.numer().to_string(),
            self.lower.denom().to_string(),
            self.upper.numer().to_string(),
            self.upper.denom().to_string(),
            mc,
            self.mc_trials.to_string(),
            self.seed.to_string(),
        ]
    }
}

/// Exact `π_k`, its closed-form bounds and a Monte Carlo estimate for every
/// `(q, s, t, k)` cell with `t <= s` and `0 < k <= s`.
pub fn run_pi_experiment(spec: &ExperimentSpec) -> Result<Vec<PiRow>> {
    spec.validate()?;
    let g = &spec.grid;
    let mut cells = Vec::new();
    for &q in &g.q {
        for &s in &g.s {
            for &t in g.t.iter().filter(|&&t| t <= s) {
                let ks: Vec<usize> = if g.k.is_empty() {
                    (1..=s).collect()
                } else {
                    g.k.iter().copied().filter(|&k| k >= 1 && k <= s).collect()
                };
                cells.extend(ks.into_iter().map(|k| (q, s, t, k)));
            }
        }
    }
    cells.sort_unstable();
    cells.dedup();
    cells
        .into_par_iter()
        .map(|(q, s, t, k)| {
            let cost = u128::from(spec.trials) * (s + k) as u128;
            let mc = if spec.budget.check(cost).is_err() {
                McEstimate::BudgetExceeded
            } else {
                let cell = cell_id(&[u64::from(q), s as u64, t as u64, k as u64]);
                let hits = (0..spec.trials)
                    .filter(|&trial| {
                        let mut rng = stream_rng(spec.seed, cell, trial);
                        periodic_cost(&uniform_symbols(&mut rng, q, s + k), k) <= t
                    })
                    .count();
                McEstimate::Value(hits as f64 / spec.trials as f64)
            };
            Ok(PiRow {
                q,
                s,
                t,
                k,
                exact: pi_exact(k, s, t, q)?,
                lower: pi_lower(k, s, t, q)?,
                upper: pi_upper(k, s, t, q)?,
                mc,
                mc_trials: spec.trials,
                seed: spec.seed,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RedundancyRow {
    pub noise: NoiseKind,
    pub q: u32,
    pub n: usize,
    pub s: usize,
    pub t: usize,
    pub method: Method,
    /// `None` when the cell exceeded the work budget.
    pub count: Option<u64>,
    pub redundancy: Option<f64>,
    /// Exponent of the asymptotic redundancy bound at `a = s / log_q n` and
    /// `δ = t / s`, when `a > 1`.
    pub exponent_bound: Option<f64>,
    pub seed: u64,
}

impl CsvRow for RedundancyRow {
    const HEADER: &'static [&'static str] = &[
        "noise",
        "q",
        "n",
        "s",
        "t",
        "method",
        "count",
        "redundancy",
        "exponent_bound",
        "seed",
    ];

    fn record(&self) -> Vec<String> {
        vec![
            noise_name(self.noise).to_string(),
            self.q.to_string(),
            self.n.to_string(),
            self.s.to_string(),
            self.t.to_string(),
            self.method.name().to_string(),
            self.count
                .map_or_else(|| "budget_exceeded".to_string(), |c| c.to_string()),
            opt(self.redundancy),
            opt(self.exponent_bound),
            self.seed.to_string(),
        ]
    }
}

fn exponent_at(n: usize, s: usize, t: usize, q: u32, noise: NoiseKind) -> Option<f64> {
    let a = s as f64 * f64::from(q).ln() / (n as f64).ln();
    let delta = t as f64 / s as f64;
    redundancy_exponent(a, delta, q, noise)
        .ok()
        .map(|e| e.exponent)
}

/// Exact family sizes under both predicates for every admissible
/// `(noise, q, n, s, t)` cell. The `(substitution, 2, 4, 2, 0)` exhaustive
/// anchor row is always present.
pub fn run_redundancy_experiment(spec: &ExperimentSpec) -> Result<Vec<RedundancyRow>> {
    spec.validate()?;
    let g = &spec.grid;
    let noises = if g.noise.is_empty() {
        vec![NoiseKind::Substitution]
    } else {
        g.noise.clone()
    };
    let mut cells = Vec::new();
    for &noise in &noises {
        for &q in &g.q {
            for &n in &g.n {
                for &s in &g.s {
                    for &t in &g.t {
                        let limit = match noise {
                            NoiseKind::Substitution => n,
                            NoiseKind::Deletion => n.saturating_sub(t),
                        };
                        if s >= 1 && s <= limit {
                            for method in [Method::Exhaustive, Method::Sufficient] {
                                cells.push((noise_name(noise), noise, q, n, s, t, method));
                            }
                        }
                    }
                }
            }
        }
    }
    let anchor = (
        "substitution",
        NoiseKind::Substitution,
        2,
        4,
        2,
        0,
        Method::Exhaustive,
    );
    if !cells.contains(&anchor) {
        cells.push(anchor);
    }
    cells.sort_unstable_by(|a, b| {
        (a.0, a.2, a.3, a.4, a.5, a.6).cmp(&(b.0, b.2, b.3, b.4, b.5, b.6))
    });
    cells
        .into_iter()
        .map(|(_, noise, q, n, s, t, method)| {
            let count = match enumerate_rrf(n, s, t, q, noise, method, spec.budget) {
                Ok(c) => Some(c),
                Err(Error::BudgetExceeded { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(RedundancyRow {
                noise,
                q,
                n,
                s,
                t,
                method,
                count,
                redundancy: count.map(|c| redundancy(n, q, c)),
                exponent_bound: exponent_at(n, s, t, q, noise),
                seed: spec.seed,
            })
        })
        .collect()
}

/// Cells where the sufficient count exceeds the exhaustive count.
pub fn redundancy_violations(rows: &[RedundancyRow]) -> Vec<String> {
    rows.iter()
        .filter(|r| r.method == Method::Sufficient)
        .filter_map(|suff| {
            let ex = rows.iter().find(|r| {
                r.method == Method::Exhaustive
                    && (r.noise, r.q, r.n, r.s, r.t) == (suff.noise, suff.q, suff.n, suff.s, suff.t)
            })?;
            match (suff.count, ex.count) {
                (Some(a), Some(b)) if a > b => Some(format!(
                    "{} q={} n={} s={} t={}: sufficient {a} > exhaustive {b}",
                    noise_name(suff.noise),
                    suff.q,
                    suff.n,
                    suff.s,
                    suff.t
                )),
                _ => None,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundtripRow {
    pub q: u32,
    pub n: usize,
    pub d_min: usize,
    pub s: usize,
    pub t: usize,
    pub certifier: Certifier,
    pub z: String,
    pub kept: usize,
    pub patterns: u64,
    pub decoded: u64,
    pub redundancy: f64,
    pub seed: u64,
}

impl RoundtripRow {
    pub fn failures(&self) -> u64 {
        self.patterns - self.decoded
    }
}

impl CsvRow for RoundtripRow {
    const HEADER: &'static [&'static str] = &[
        "q",
        "n",
        "d_min",
        "s",
        "t",
        "certifier",
        "z",
        "kept",
        "patterns",
        "decoded",
        "failures",
        "redundancy",
        "seed",
    ];

    fn record(&self) -> Vec<String> {
        vec![
            self.q.to_string(),
            self.n.to_string(),
            self.d_min.to_string(),
            self.s.to_string(),
            self.t.to_string(),
            self.certifier.name().to_string(),
            self.z.clone(),
            self.kept.to_string(),
            self.patterns.to_string(),
            self.decoded.to_string(),
            self.failures().to_string(),
            self.redundancy.to_string(),
            self.seed.to_string(),
        ]
    }
}

/// Offsets scanned exhaustively up to this many; beyond it `trials` random
/// offsets are drawn.
const EXHAUSTIVE_OFFSETS: u64 = 1 << 16;

/// Builds the lexicode coset codec for each `(q, n, d_min, s)` cell and
/// decodes every pattern of at most `t` substitutions of every kept word.
pub fn run_roundtrip_experiment(spec: &ExperimentSpec) -> Result<Vec<RoundtripRow>> {
    spec.validate()?;
    let g = &spec.grid;
    let mut cells = Vec::new();
    for &q in &g.q {
        for &n in &g.n {
            for &d_min in g.d_min.iter().filter(|&&d| d >= 1 && d <= n) {
                for &s in g.s.iter().filter(|&&s| s >= 1 && s <= n) {
                    cells.push((q, n, d_min, s));
                }
            }
        }
    }
    cells.sort_unstable();
    cells.dedup();
    cells
        .into_iter()
        .map(|(q, n, d_min, s)| {
            let inner = build_inner_lexicode(n, q, d_min, spec.budget)?;
            let t = inner.t_capability();
            let offsets = u64::from(q).checked_pow(n as u32).unwrap_or(u64::MAX);
            let strategy = if offsets <= EXHAUSTIVE_OFFSETS {
                CosetStrategy::Exhaustive
            } else {
                CosetStrategy::Random {
                    seed: spec.seed,
                    trials: spec.trials,
                }
            };
            let code = build_code(inner, s, strategy, spec.certifier, spec.budget)?;
            let book = code.codebook();
            let ball = saturating_u128(&hamming_ball_size(n, t, q)?);
            spec.budget.check(
                ball.saturating_mul(book.len() as u128)
                    .saturating_mul(n as u128),
            )?;
            let (patterns, decoded) = book
                .words
                .par_iter()
                .enumerate()
                .map(|(m, w)| {
                    let ys = substitution_set(w, t, NoiseMode::UpTo).expect("t <= n");
                    let ok = ys
                        .iter()
                        .filter(|y| {
                            let z = observe(y, s + 1).expect("s < n");
                            decode(book, &z).ok() == Some(m)
                        })
                        .count();
                    (ys.len() as u64, ok as u64)
                })
                .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
            Ok(RoundtripRow {
                q,
                n,
                d_min,
                s,
                t,
                certifier: spec.certifier,
                z: code.z.to_text(),
                kept: book.len(),
                patterns,
                decoded,
                redundancy: book.redundancy(),
                seed: spec.seed,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateTrendRow {
    pub q: u32,
    pub n: usize,
    pub a: f64,
    pub delta: f64,
    pub s: usize,
    pub t: usize,
    pub trials: u64,
    pub accepted: u64,
    pub seed: u64,
}

impl RateTrendRow {
    pub fn fraction(&self) -> f64 {
        self.accepted as f64 / self.trials as f64
    }

    /// Binomial standard error of [`RateTrendRow::fraction`].
    pub fn std_error(&self) -> f64 {
        let p = self.fraction();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

impl CsvRow for RateTrendRow {
    const HEADER: &'static [&'static str] = &[
        "q",
        "n",
        "a",
        "delta",
        "s",
        "t",
        "trials",
        "accepted",
        "fraction",
        "std_error",
        "seed",
    ];

    fn record(&self) -> Vec<String> {
        vec![
            self.q.to_string(),
            self.n.to_string(),
            self.a.to_string(),
            self.delta.to_string(),
            self.s.to_string(),
            self.t.to_string(),
            self.trials.to_string(),
            self.accepted.to_string(),
            self.fraction().to_string(),
            self.std_error().to_string(),
            self.seed.to_string(),
        ]
    }
}

/// Fraction of uniform strings passing the window-distance test, per
/// `(q, n, delta, a)` cell with `s` and `t` derived from the parameters.
pub fn run_rate_trend_experiment(spec: &ExperimentSpec) -> Result<Vec<RateTrendRow>> {
    spec.validate()?;
    let g = &spec.grid;
    let mut rows = Vec::new();
    for &q in &g.q {
        for &n in &g.n {
            for &delta in &g.delta {
                for &a in &g.a {
                    let p = derive_params(n, q, a, delta)?;
                    let cell = cell_id(&[u64::from(q), n as u64, a.to_bits(), delta.to_bits()]);
                    let accepted = (0..spec.trials)
                        .into_par_iter()
                        .filter(|&trial| {
                            let mut rng = stream_rng(spec.seed, cell, trial);
                            let x = RingString::new(q, uniform_symbols(&mut rng, q, n))
                                .expect("symbols below q");
                            is_rrf_sub_sufficient(&x, p.s, p.t).expect("s <= n")
                        })
                        .count() as u64;
                    rows.push(RateTrendRow {
                        q,
                        n,
                        a,
                        delta,
                        s: p.s,
                        t: p.t,
                        trials: spec.trials,
                        accepted,
                        seed: spec.seed,
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// Adjacent cells (in increasing `a` for fixed `q, n, delta`) whose fraction
/// drops by more than `sigmas` combined standard errors.
pub fn rate_trend_violations(rows: &[RateTrendRow], sigmas: f64) -> Vec<String> {
    let mut sorted: Vec<&RateTrendRow> = rows.iter().collect();
    sorted.sort_by(|x, y| {
        (x.q, x.n)
            .cmp(&(y.q, y.n))
            .then(x.delta.total_cmp(&y.delta))
            .then(x.a.total_cmp(&y.a))
    });
    sorted
        .windows(2)
        .filter(|w| {
            (w[0].q, w[0].n, w[0].delta.to_bits()) == (w[1].q, w[1].n, w[1].delta.to_bits())
        })
        .filter_map(|w| {
            let se = w[0].std_error().hypot(w[1].std_error());
            let drop = w[0].fraction() - w[1].fraction();
            (drop > sigmas * se).then(|| {
                format!(
                    "fraction falls from {} at a={} to {} at a={}",
                    w[0].fraction(),
                    w[0].a,
                    w[1].fraction(),
                    w[1].a
                )
            })
        })
        .collect()
}
