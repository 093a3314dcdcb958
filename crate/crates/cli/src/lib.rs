//! `subchan` command-line front end.
//!
//! Exit status: 0 on success, 1 when a run fails or a checked invariant is
//! violated, 2 on usage errors (bad flags, invalid parameters, malformed
//! input files).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;

use substring_channel::bounds::{
    converse_empty, delta_tilde, eb_rate, entropy_q, gv_rate, hamming_ball_size,
    pi_asymptotic_upper, pi_exact, pi_lower, pi_upper, rate_threshold, redundancy_exponent,
    ExponentValidity, PiBoundVariant,
};
use substring_channel::channels::{observe, substitution_set, NoiseMode};
use substring_channel::codec::{build_code, build_inner_lexicode, decode, encode, Codebook};
use substring_channel::generator::{
    default_max_rounds, enumerate_rrf, generate_rrf_sub, redundancy, Certifier, CosetStrategy,
    Method,
};
use substring_channel::harness::{
    cell_id, noise_name, rate_trend_violations, redundancy_violations, run_pi_experiment,
    run_rate_trend_experiment, run_redundancy_experiment, run_roundtrip_experiment, write_csv,
    CsvRow, ExperimentKind, ExperimentSpec, ParamGrid,
};
use substring_channel::reconstruct::assemble;
use substring_channel::repeatfree::{
    is_rrf_del_exhaustive, is_rrf_del_sufficient, is_rrf_sub_exhaustive, is_rrf_sub_sufficient,
};
use substring_channel::strings::{derive_params, format_strings, parse_strings};
use substring_channel::{Error, KmerMultiset, NoiseKind, WorkBudget};

#[derive(Parser, Debug)]
#[command(
    name = "subchan",
    version,
    about = "Resilient repeat-free strings and the noisy substring channel"
)]
struct Cli {
    /// Master seed for all randomness.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Maximum number of elementary checks for exhaustive routines.
    #[arg(long, global = true, default_value_t = WorkBudget::DEFAULT.0)]
    budget: u64,
    /// Write the main output to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format for tabular results.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Noise {
    Substitution,
    Deletion,
}

impl From<Noise> for NoiseKind {
    fn from(n: Noise) -> Self {
        match n {
            Noise::Substitution => NoiseKind::Substitution,
            Noise::Deletion => NoiseKind::Deletion,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CheckMode {
    Sufficient,
    Exhaustive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Strategy {
    Exhaustive,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Pi,
    Redundancy,
    Roundtrip,
    RateTrend,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Test each string of a strings file for resilient repeat-freeness.
    Check {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        t: usize,
        #[arg(long, value_enum, default_value = "sufficient")]
        mode: CheckMode,
        #[arg(long, value_enum, default_value = "substitution")]
        noise: Noise,
    },
    /// Produce strings certified against t substitutions by resampling.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 2)]
        q: u32,
        #[arg(long, default_value_t = 1)]
        count: u64,
        /// Defaults to 100 n s.
        #[arg(long)]
        max_rounds: Option<u64>,
    },
    /// Count strings of length n accepted by a membership predicate.
    Enumerate {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        t: usize,
        #[arg(long, value_enum, default_value = "substitution")]
        noise: Noise,
        #[arg(long, value_enum, default_value = "exhaustive")]
        method: CheckMode,
    },
    /// Rebuild a string from a k-mer multiset file.
    Assemble {
        #[arg(long)]
        file: PathBuf,
    },
    /// Evaluate every bound computable from the given parameters as CSV.
    Bounds {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Print the root delta-tilde of H_q(2d/3) = 2/3.
    DeltaTilde {
        #[arg(long)]
        q: u32,
    },
    /// Exact overlap probabilities with bounds and Monte Carlo estimates.
    Pi {
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<u32>,
        #[arg(long, value_delimiter = ',', required = true)]
        s: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<usize>,
        /// Defaults to every 0 < k <= s.
        #[arg(long, value_delimiter = ',')]
        k: Vec<usize>,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
    /// Build, use and test a coset codebook.
    Codec {
        #[command(subcommand)]
        action: CodecAction,
    },
    /// Run an experiment grid and write CSV rows.
    Experiment(ExperimentArgs),
}

#[derive(Subcommand, Debug)]
enum CodecAction {
    /// Build a codebook from a lexicode inner code.
    Build {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        q: u32,
        #[arg(long)]
        d_min: usize,
        #[arg(long)]
        s: usize,
        #[arg(long, value_enum, default_value = "sufficient")]
        certifier: CheckMode,
        #[arg(long, value_enum, default_value = "exhaustive")]
        strategy: Strategy,
        /// Offsets drawn by the random strategy.
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
    /// Print the codeword of a message index.
    Encode {
        #[arg(long)]
        codebook: PathBuf,
        #[arg(long)]
        msg: usize,
    },
    /// Decode a k-mer multiset file to a message index.
    Decode {
        #[arg(long)]
        codebook: PathBuf,
        #[arg(long)]
        file: PathBuf,
    },
    /// Decode every pattern of at most t substitutions of every codeword.
    Roundtrip {
        #[arg(long)]
        codebook: PathBuf,
    },
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, value_delimiter = ',')]
    q: Vec<u32>,
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    a: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    delta: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    s: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    t: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    d_min: Vec<usize>,
    #[arg(long, value_delimiter = ',', value_enum)]
    noise: Vec<Noise>,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, value_enum, default_value = "sufficient")]
    certifier: CheckMode,
}

/// A failure carrying its exit status.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Argument(_) | Error::Parameter(_) | Error::Domain(_) | Error::Parse { .. } => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn violation(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

type Outcome = std::result::Result<Output, Failure>;

/// Main output plus an optional failure detected after producing it.
struct Output {
    text: String,
    failure: Option<Failure>,
}

impl From<String> for Output {
    fn from(text: String) -> Self {
        Output {
            text,
            failure: None,
        }
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn csv_text<R: CsvRow>(rows: &[R]) -> std::result::Result<String, Failure> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

fn certifier(mode: CheckMode) -> Certifier {
    match mode {
        CheckMode::Sufficient => Certifier::Sufficient,
        CheckMode::Exhaustive => Certifier::Exhaustive,
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let target: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let result = dispatch(&cli);
    let (text, failure) = match result {
        Ok(out) => (Some(out.text), out.failure),
        Err(f) => (None, Some(f)),
    };
    if let Some(text) = text {
        let written = match &cli.out {
            Some(path) => {
                fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display()))
            }
            None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
        };
        if let Err(msg) = written {
            let _ = writeln!(stderr, "error: {msg}");
            return 1;
        }
    }
    match failure {
        Some(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
        None => 0,
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    let budget = WorkBudget(cli.budget);
    let csv = cli.format == Some(Format::Csv);
    match &cli.command {
        Command::Check {
            file,
            s,
            t,
            mode,
            noise,
        } => check(file, *s, *t, *mode, *noise, budget),
        Command::Generate {
            n,
            s,
            t,
            q,
            count,
            max_rounds,
        } => {
            let rounds = max_rounds.unwrap_or_else(|| default_max_rounds(*n, *s));
            let mut words = Vec::new();
            for i in 0..*count {
                let seed = if *count == 1 {
                    cli.seed
                } else {
                    cell_id(&[cli.seed, i])
                };
                words.push(generate_rrf_sub(*n, *s, *t, *q, seed, rounds)?);
            }
            Ok(format_strings(*q, &words).into())
        }
        Command::Enumerate {
            q,
            n,
            s,
            t,
            noise,
            method,
        } => {
            let method = match method {
                CheckMode::Exhaustive => Method::Exhaustive,
                CheckMode::Sufficient => Method::Sufficient,
            };
            let count = enumerate_rrf(*n, *s, *t, *q, (*noise).into(), method, budget)?;
            let red = redundancy(*n, *q, count);
            if csv {
                Ok(csv_text(&[Census {
                    n: *n,
                    s: *s,
                    t: *t,
                    q: *q,
                    method,
                    count,
                    red,
                }])?
                .into())
            } else {
                Ok(format!("count={count} redundancy={red:?}\n").into())
            }
        }
        Command::Assemble { file } => {
            let z = KmerMultiset::parse(&read(file)?)?;
            let y = assemble(&z)?;
            Ok(format_strings(y.q(), [&y]).into())
        }
        Command::Bounds {
            q,
            a,
            delta,
            n,
            s,
            t,
            k,
        } => Ok(csv_text(&bounds_rows(*q, *a, *delta, *n, *s, *t, *k)?)?.into()),
        Command::DeltaTilde { q } => Ok(format!("{:.4}\n", delta_tilde(*q)?).into()),
        Command::Pi { q, s, t, k, trials } => {
            let grid = ParamGrid {
                q: q.clone(),
                s: s.clone(),
                t: t.clone(),
                k: k.clone(),
                ..ParamGrid::default()
            };
            let spec = ExperimentSpec {
                trials: *trials,
                seed: cli.seed,
                budget,
                ..ExperimentSpec::new(ExperimentKind::Pi, grid)
            };
            pi_output(&spec)
        }
        Command::Codec { action } => codec(action, cli.seed, budget),
        Command::Experiment(args) => experiment(args, cli.seed, budget),
    }
}

fn check(
    file: &Path,
    s: usize,
    t: usize,
    mode: CheckMode,
    noise: Noise,
    budget: WorkBudget,
) -> Outcome {
    let (_, strings) = parse_strings(&read(file)?)?;
    let mut out = String::new();
    for x in &strings {
        let ok = match (noise, mode) {
            (Noise::Substitution, CheckMode::Sufficient) => is_rrf_sub_sufficient(x, s, t)?,
            (Noise::Substitution, CheckMode::Exhaustive) => is_rrf_sub_exhaustive(x, s, t, budget)?,
            (Noise::Deletion, CheckMode::Sufficient) => is_rrf_del_sufficient(x, s, t)?,
            (Noise::Deletion, CheckMode::Exhaustive) => is_rrf_del_exhaustive(x, s, t, budget)?,
        };
        out.push_str(if ok { "accept\n" } else { "reject\n" });
    }
    Ok(out.into())
}

struct Census {
    n: usize,
    s: usize,
    t: usize,
    q: u32,
    method: Method,
    count: u64,
    red: f64,
}

impl CsvRow for Census {
    const HEADER: &'static [&'static str] = &["n", "s", "t", "q", "method", "count", "redundancy"];

    fn record(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.s.to_string(),
            self.t.to_string(),
            self.q.to_string(),
            self.method.name().to_string(),
            self.count.to_string(),
            format!("{:?}", self.red),
        ]
    }
}

#[derive(Default)]
struct BoundRow {
    quantity: &'static str,
    q: u32,
    a: Option<f64>,
    delta: Option<f64>,
    s: Option<usize>,
    t: Option<usize>,
    k: Option<usize>,
    exact: Option<(String, String)>,
    value: f64,
    variant: String,
}

impl CsvRow for BoundRow {
    const HEADER: &'static [&'static str] = &[
        "quantity",
        "q",
        "a",
        "delta",
        "s",
        "t",
        "k",
        "value_exact_num",
        "value_exact_den",
        "value_float",
        "variant",
    ];

    fn record(&self) -> Vec<String> {
        let opt = |v: Option<String>| v.unwrap_or_default();
        let (num, den) = self.exact.clone().unwrap_or_default();
        vec![
            self.quantity.to_string(),
            self.q.to_string(),
            opt(self.a.map(|v| v.to_string())),
            opt(self.delta.map(|v| v.to_string())),
            opt(self.s.map(|v| v.to_string())),
            opt(self.t.map(|v| v.to_string())),
            opt(self.k.map(|v| v.to_string())),
            num,
            den,
            self.value.to_string(),
            self.variant.clone(),
        ]
    }
}

fn exact_pair(r: &BigRational) -> (Option<(String, String)>, f64) {
    (
        Some((r.numer().to_string(), r.denom().to_string())),
        r.to_f64().unwrap_or(f64::NAN),
    )
}

fn validity_name(v: ExponentValidity) -> &'static str {
    match v {
        ExponentValidity::Proven => "proven",
        ExponentValidity::Extended => "extended",
        ExponentValidity::Unproven => "unproven",
    }
}

#[allow(clippy::too_many_arguments)]
fn bounds_rows(
    q: u32,
    a: Option<f64>,
    delta: Option<f64>,
    n: Option<usize>,
    s: Option<usize>,
    t: Option<usize>,
    k: Option<usize>,
) -> std::result::Result<Vec<BoundRow>, Failure> {
    let mut rows = vec![BoundRow {
        quantity: "delta_tilde",
        q,
        value: delta_tilde(q)?,
        ..BoundRow::default()
    }];
    if let Some(d) = delta {
        let base = || BoundRow {
            q,
            delta: Some(d),
            ..BoundRow::default()
        };
        rows.push(BoundRow {
            quantity: "entropy",
            value: entropy_q(d, q)?,
            ..base()
        });
        if d <= f64::from(q - 1) / f64::from(q) {
            rows.push(BoundRow {
                quantity: "gv_rate",
                value: gv_rate(d, q)?,
                ..base()
            });
            rows.push(BoundRow {
                quantity: "eb_rate",
                value: eb_rate(d, q)?,
                ..base()
            });
        }
        for noise in [NoiseKind::Substitution, NoiseKind::Deletion] {
            let th = rate_threshold(d, q, noise)?;
            let variant = noise_name(noise).to_string();
            rows.push(BoundRow {
                quantity: "rate_threshold",
                value: th.rate_one,
                variant: variant.clone(),
                ..base()
            });
            rows.push(BoundRow {
                quantity: "constant_threshold",
                value: th.constant_redundancy,
                variant,
                ..base()
            });
        }
        if let Some(a) = a {
            let base = || BoundRow {
                q,
                a: Some(a),
                delta: Some(d),
                ..BoundRow::default()
            };
            let empty = converse_empty(a, d, q)?;
            rows.push(BoundRow {
                quantity: "converse_empty",
                value: if empty { 1.0 } else { 0.0 },
                ..base()
            });
            if a > 1.0 {
                for noise in [NoiseKind::Substitution, NoiseKind::Deletion] {
                    let e = redundancy_exponent(a, d, q, noise)?;
                    rows.push(BoundRow {
                        quantity: "redundancy_exponent",
                        value: e.exponent,
                        variant: format!("{}:{}", noise_name(noise), validity_name(e.validity)),
                        ..base()
                    });
                }
            }
            if let Some(n) = n {
                let p = derive_params(n, q, a, d)?;
                let ks: Vec<usize> = match k {
                    Some(k) => vec![k],
                    None => vec![1, p.s],
                };
                for k in ks {
                    for (variant, name) in [
                        (PiBoundVariant::Naive, "naive"),
                        (PiBoundVariant::Improved, "improved"),
                    ] {
                        match pi_asymptotic_upper(n, a, d, q, k, variant) {
                            Ok(value) => rows.push(BoundRow {
                                quantity: "pi_asymptotic_upper",
                                s: Some(p.s),
                                t: Some(p.t),
                                k: Some(k),
                                value,
                                variant: name.to_string(),
                                ..base()
                            }),
                            Err(Error::Domain(_)) => {}
                            Err(e) => return Err(e.into()),
                        }
                    }
                }
            }
        }
    }
    if let (Some(s), Some(t)) = (s, t) {
        let ball = hamming_ball_size(s, t, q)?;
        rows.push(BoundRow {
            quantity: "hamming_ball_size",
            q,
            s: Some(s),
            t: Some(t),
            exact: Some((ball.to_string(), "1".to_string())),
            value: ball.to_f64().unwrap_or(f64::INFINITY),
            ..BoundRow::default()
        });
        let ks: Vec<usize> = match k {
            Some(k) => vec![k],
            None => (1..=s).collect(),
        };
        for k in ks {
            for (quantity, r) in [
                ("pi_exact", pi_exact(k, s, t, q)?),
                ("pi_lower", pi_lower(k, s, t, q)?),
                ("pi_upper", pi_upper(k, s, t, q)?),
            ] {
                let (exact, value) = exact_pair(&r);
                rows.push(BoundRow {
                    quantity,
                    q,
                    s: Some(s),
                    t: Some(t),
                    k: Some(k),
                    exact,
                    value,
                    ..BoundRow::default()
                });
            }
        }
    }
    Ok(rows)
}

fn pi_output(spec: &ExperimentSpec) -> Outcome {
    let rows = run_pi_experiment(spec)?;
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| !r.sandwich_holds())
        .map(|r| {
            format!(
                "sandwich violated at q={} s={} t={} k={}",
                r.q, r.s, r.t, r.k
            )
        })
        .collect();
    Ok(Output {
        text: csv_text(&rows)?,
        failure: (!bad.is_empty()).then(|| violation(bad.join("; "))),
    })
}

fn codec(action: &CodecAction, seed: u64, budget: WorkBudget) -> Outcome {
    match action {
        CodecAction::Build {
            n,
            q,
            d_min,
            s,
            certifier: mode,
            strategy,
            trials,
        } => {
            let inner = build_inner_lexicode(*n, *q, *d_min, budget)?;
            let strategy = match strategy {
                Strategy::Exhaustive => CosetStrategy::Exhaustive,
                Strategy::Random => CosetStrategy::Random {
                    seed,
                    trials: *trials,
                },
            };
            let code = build_code(inner, *s, strategy, certifier(*mode), budget)?;
            Ok(code.codebook().to_text().into())
        }
        CodecAction::Encode { codebook, msg } => {
            let book = Codebook::parse(&read(codebook)?)?;
            Ok(format!("{}\n", encode(&book, *msg)?.to_text()).into())
        }
        CodecAction::Decode { codebook, file } => {
            let book = Codebook::parse(&read(codebook)?)?;
            let z = KmerMultiset::parse(&read(file)?)?;
            Ok(format!("{}\n", decode(&book, &z)?).into())
        }
        CodecAction::Roundtrip { codebook } => {
            let book = Codebook::parse(&read(codebook)?)?;
            let (mut patterns, mut decoded) = (0u64, 0u64);
            for (m, w) in book.words.iter().enumerate() {
                for y in substitution_set(w, book.t, NoiseMode::UpTo)? {
                    patterns += 1;
                    if decode(&book, &observe(&y, book.s + 1)?).ok() == Some(m) {
                        decoded += 1;
                    }
                }
            }
            let failures = patterns - decoded;
            Ok(Output {
                text: format!(
                    "kept={} patterns={patterns} decoded={decoded} failures={failures}\n",
                    book.len()
                ),
                failure: (failures > 0)
                    .then(|| violation(format!("{failures} patterns decoded wrongly"))),
            })
        }
    }
}

fn experiment(args: &ExperimentArgs, seed: u64, budget: WorkBudget) -> Outcome {
    let kind = match args.kind {
        Kind::Pi => ExperimentKind::Pi,
        Kind::Redundancy => ExperimentKind::Redundancy,
        Kind::Roundtrip => ExperimentKind::Roundtrip,
        Kind::RateTrend => ExperimentKind::RateTrend,
    };
    let grid = ParamGrid {
        q: args.q.clone(),
        n: args.n.clone(),
        a: args.a.clone(),
        delta: args.delta.clone(),
        s: args.s.clone(),
        t: args.t.clone(),
        k: args.k.clone(),
        d_min: args.d_min.clone(),
        noise: args.noise.iter().map(|&n| n.into()).collect(),
    };
    let spec = ExperimentSpec {
        trials: args.trials,
        seed,
        budget,
        certifier: certifier(args.certifier),
        ..ExperimentSpec::new(kind, grid)
    };
    match kind {
        ExperimentKind::Pi => pi_output(&spec),
        ExperimentKind::Redundancy => {
            let rows = run_redundancy_experiment(&spec)?;
            let bad = redundancy_violations(&rows);
            Ok(Output {
                text: csv_text(&rows)?,
                failure: (!bad.is_empty()).then(|| violation(bad.join("; "))),
            })
        }
        ExperimentKind::Roundtrip => {
            let rows = run_roundtrip_experiment(&spec)?;
            let failures: u64 = rows.iter().map(|r| r.failures()).sum();
            Ok(Output {
                text: csv_text(&rows)?,
                failure: (failures > 0)
                    .then(|| violation(format!("{failures} patterns decoded wrongly"))),
            })
        }
        ExperimentKind::RateTrend => {
            let rows = run_rate_trend_experiment(&spec)?;
            let bad = rate_trend_violations(&rows, 3.0);
            Ok(Output {
                text: csv_text(&rows)?,
                failure: (!bad.is_empty()).then(|| violation(bad.join("; "))),
            })
        }
    }
}
