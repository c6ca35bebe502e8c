//! Command-line driver for the laboratory: run the cycle-promise solver,
//! query the complexity oracles, extract answer polynomials, play the
//! edge-query game, and evaluate round-bound formulas.
//!
//! Every subcommand emits one JSON report that embeds the report schema
//! version, the random-generator version, and the fully resolved
//! configuration, so replaying a report's config reproduces its bytes.
//! All randomness flows from the single `--seed` value through the named
//! generator; `--out` writes atomically (temp file + rename), stdout
//! otherwise. Exit codes: 0 ok, 2 model violation, 3 invalid config,
//! 4 resource limit.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num::bigint::{BigInt, BigUint};
use num::{BigRational, Signed, ToPrimitive, Zero};
use serde::Serialize;

use ampc_core::adversary::{
    new_adversary, play, QueryStrategy, RandomStrategy, SweepStrategy, WalkStrategy,
};
use ampc_core::algos::{det_round_lower_bound, rand_round_lower_bound, solve_ockc, OckcSolver};
use ampc_core::ampc::{run, Outcome, RunConfig, TranscriptLevel};
use ampc_core::boolfn::{
    enumerate_ockc, promise_majority, sample_ockc_instance, slot_count, GraphInstance,
    PromiseFunction,
};
use ampc_core::poly::{extract_polynomial, CubeTable, DumpEntry, ExtractOptions};
use ampc_core::qc::{approx_certificate_complexity, certificate_complexity, det_query_complexity};
use ampc_core::{rng, Error, Result};

/// Version tag embedded in every report.
const SCHEMA: &str = "ampclab/report/v1";

// ------------------------------------------------------------ entry point --

#[derive(Parser)]
#[command(name = "ampclab", version, about = "Experiment driver for the AMPC laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the cycle-promise solver on enumerated, sampled, or file instances
    Solve(SolveArgs),
    /// Compute a complexity measure of a promise family by brute force
    Complexity(ComplexityArgs),
    /// Extract the solver's answer polynomial by a full input sweep
    Extract(ExtractArgs),
    /// Play one edge-query game against the adaptive environment
    Adversary(AdversaryArgs),
    /// Evaluate a round lower-bound formula exactly
    Bounds(BoundsArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3, // flag mistakes are config errors
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Complexity(args) => cmd_complexity(args),
        Command::Extract(args) => cmd_extract(args),
        Command::Adversary(args) => cmd_adversary(args),
        Command::Bounds(args) => cmd_bounds(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code().clamp(0, 255) as u8)
        }
    }
}

// ------------------------------------------------- shared flags and output --

/// Capacity selection: a literal `--S` or an exponent `--eps` with
/// S = ⌊n^eps⌋ computed by exact integer roots.
#[derive(Args)]
struct CapacityArgs {
    /// Per-machine capacity (words per round, values per key).
    #[arg(long = "S")]
    s: Option<u64>,
    /// Capacity exponent in (0, 1]: S = floor(n^eps); a fraction `p/q` or a decimal.
    #[arg(long, conflicts_with = "s")]
    eps: Option<String>,
}

impl CapacityArgs {
    fn resolve(&self, n: u64) -> Result<Capacity> {
        match (self.s, &self.eps) {
            (Some(s), None) => Ok(Capacity { s, eps: None }),
            (None, Some(text)) => {
                let eps = parse_rational(text)?;
                if eps <= BigRational::zero() || eps > BigRational::from(BigInt::from(1)) {
                    return Err(Error::invalid(format!("--eps must lie in (0, 1], got {text}")));
                }
                Ok(Capacity {
                    s: floor_power(n, &eps)?,
                    eps: Some(text.clone()),
                })
            }
            _ => Err(Error::invalid("exactly one of --S / --eps must be given")),
        }
    }
}

struct Capacity {
    s: u64,
    eps: Option<String>,
}

/// `⌊n^(p/q)⌋` by exact integer arithmetic: the q-th root of n^p.
fn floor_power(n: u64, eps: &BigRational) -> Result<u64> {
    let p = eps
        .numer()
        .to_u32()
        .filter(|&p| p <= 64)
        .ok_or_else(|| Error::invalid("--eps numerator must fit in 1..=64"))?;
    let q = eps
        .denom()
        .to_u32()
        .filter(|&q| q <= 64)
        .ok_or_else(|| Error::invalid("--eps denominator must fit in 1..=64"))?;
    let root = BigUint::from(n).pow(p).nth_root(q);
    root.to_u64()
        .ok_or_else(|| Error::invalid("computed capacity exceeds 64 bits"))
}

/// Parses `p/q`, a decimal (`0.25`), or an integer into an exact rational.
fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = |_| Error::invalid(format!("`{text}` is not a rational number"));
    let t = text.trim();
    let (negative, t) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let magnitude = if let Some((numer, denom)) = t.split_once('/') {
        let numer: BigInt = numer.trim().parse().map_err(bad)?;
        let denom: BigInt = denom.trim().parse().map_err(bad)?;
        if denom.is_zero() || numer.is_negative() || denom.is_negative() {
            return Err(Error::invalid(format!("`{text}` is not a valid fraction")));
        }
        BigRational::new(numer, denom)
    } else if let Some((int, frac)) = t.split_once('.') {
        if !frac.chars().all(|c| c.is_ascii_digit()) || (int.is_empty() && frac.is_empty()) {
            return Err(Error::invalid(format!("`{text}` is not a decimal number")));
        }
        let int: BigInt = if int.is_empty() { BigInt::zero() } else { int.parse().map_err(bad)? };
        let frac_digits: BigInt = if frac.is_empty() { BigInt::zero() } else { frac.parse().map_err(bad)? };
        let scale = BigInt::from(10).pow(frac.len() as u32);
        BigRational::new(int * &scale + frac_digits, scale)
    } else {
        BigRational::from(t.parse::<BigInt>().map_err(bad)?)
    };
    Ok(if negative { -magnitude } else { magnitude })
}

/// The report envelope: versions, the resolved configuration, the result.
#[derive(Serialize)]
struct Report<C: Serialize, R: Serialize> {
    schema: &'static str,
    generator: &'static str,
    command: &'static str,
    config: C,
    result: R,
}

fn emit<C: Serialize, R: Serialize>(
    command: &'static str,
    config: C,
    result: R,
    out: Option<&Path>,
) -> Result<()> {
    let report = Report {
        schema: SCHEMA,
        generator: rng::GENERATOR,
        command,
        config,
        result,
    };
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    match out {
        None => {
            // A reader that stops consuming (e.g. a pipe into `head`) is not
            // an error worth reporting.
            use std::io::Write as _;
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                other => Ok(other?),
            }
        }
        Some(path) => write_atomic(path, text.as_bytes()),
    }
}

/// Writes via a sibling temp file and a rename, so readers never observe a
/// partial report.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn path_string(path: &Path) -> String {
    path.display().to_string()
}

// ------------------------------------------------------------------ solve --

#[derive(Args)]
struct SolveArgs {
    /// Vertex count.
    #[arg(long)]
    n: usize,
    /// Cycle count of the 0-class (the 1-class is a single n-cycle).
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[command(flatten)]
    capacity: CapacityArgs,
    /// Seed for the walk anchor and for instance sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sampled instances per promise class (ignored by the other modes).
    #[arg(long, default_value_t = 4)]
    samples: u64,
    /// Run every promise instance instead of sampling (enumerable n only).
    #[arg(long, conflicts_with = "instance")]
    exhaustive: bool,
    /// Run one instance from a JSON file {"n": .., "edges": [[u, v], ..]}.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Abort on any capacity breach instead of stopping the machine.
    #[arg(long)]
    strict: bool,
    /// Report file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct SolveConfig {
    n: usize,
    k: usize,
    s: u64,
    eps: Option<String>,
    seed: u64,
    mode: &'static str,
    samples: Option<u64>,
    instance: Option<String>,
    strict: bool,
    out: Option<String>,
}

/// One executed run, reduced to what the aggregate modes tally.
struct RunStats {
    answer: Option<bool>,
    rounds: usize,
    max_budget_used: u64,
}

fn run_solver(solver: &OckcSolver, x: &ampc_core::boolfn::BitString, exec: &RunConfig) -> Result<RunStats> {
    let report = run(solver, x, exec)?;
    let max_budget_used = report
        .transcript
        .records
        .iter()
        .map(|r| r.budget_used)
        .max()
        .unwrap_or(0);
    Ok(RunStats {
        answer: report.outcome.bit(),
        rounds: report.rounds,
        max_budget_used,
    })
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    let capacity = args.capacity.resolve(args.n as u64)?;
    let solver = solve_ockc(args.n, args.k, capacity.s, false)?.with_seed(args.seed);
    let exec = if args.strict {
        RunConfig::strict(capacity.s)
    } else {
        RunConfig::lenient(capacity.s)
    }
    .with_transcript(TranscriptLevel::Summary);

    let mode = if args.exhaustive {
        "exhaustive"
    } else if args.instance.is_some() {
        "instance"
    } else {
        "sampled"
    };
    let config = SolveConfig {
        n: args.n,
        k: args.k,
        s: capacity.s,
        eps: capacity.eps,
        seed: args.seed,
        mode,
        samples: (mode == "sampled").then_some(args.samples),
        instance: args.instance.as_deref().map(path_string),
        strict: args.strict,
        out: args.out.as_deref().map(path_string),
    };

    match mode {
        "instance" => {
            let path = args.instance.as_deref().expect("mode requires the flag");
            let g = GraphInstance::from_json(&fs::read_to_string(path)?)?;
            if g.n() != args.n {
                return Err(Error::invalid(format!(
                    "--n {} disagrees with the instance file ({} vertices)",
                    args.n,
                    g.n()
                )));
            }
            let report = run(&solver, g.bits(), &exec)?;
            let max_budget_used = report
                .transcript
                .records
                .iter()
                .map(|r| r.budget_used)
                .max()
                .unwrap_or(0);
            let flagged_vertex = match report.outcome {
                Outcome::Answer(_) => None,
                Outcome::NoAnswer(_) => report
                    .final_store
                    .values(&OckcSolver::error_key())
                    .first()
                    .map(|v| v.word(0)),
            };
            // The machine-round transcript is the run's replayable artifact;
            // it accompanies the report whenever one is written to disk.
            let transcript_path = match &args.out {
                Some(out) => {
                    let mut name = out.as_os_str().to_owned();
                    name.push(".transcript.jsonl");
                    let path = PathBuf::from(name);
                    let mut buf = Vec::new();
                    report.transcript.write_jsonl(&exec, &mut buf)?;
                    write_atomic(&path, &buf)?;
                    Some(path_string(&path))
                }
                None => None,
            };
            #[derive(Serialize)]
            struct InstanceResult {
                answer: Option<u8>,
                rounds: usize,
                max_budget_used: u64,
                flagged_vertex: Option<u64>,
                transcript_path: Option<String>,
            }
            emit(
                "solve",
                config,
                InstanceResult {
                    answer: report.outcome.bit().map(u8::from),
                    rounds: report.rounds,
                    max_budget_used,
                    flagged_vertex,
                    transcript_path,
                },
                args.out.as_deref(),
            )
        }
        _ => {
            // Exhaustive and sampled modes aggregate per-class correctness.
            let mut total = 0u64;
            let mut correct = 0u64;
            let mut rounds = 0usize;
            let mut max_budget_used = 0u64;
            let mut tally = |stats: RunStats, expected: bool| {
                total += 1;
                if stats.answer == Some(expected) {
                    correct += 1;
                }
                rounds = rounds.max(stats.rounds);
                max_budget_used = max_budget_used.max(stats.max_budget_used);
            };
            if mode == "exhaustive" {
                let f = enumerate_ockc(args.n, args.k)?;
                for (x, expected) in f.promise_iter() {
                    tally(run_solver(&solver, x, &exec)?, expected);
                }
            } else {
                for (label, expected) in [("solve-sample-one", true), ("solve-sample-zero", false)] {
                    for i in 0..args.samples {
                        let mut r = rng::substream(args.seed, label, i);
                        let g = sample_ockc_instance(args.n, args.k, expected, &mut r)?;
                        tally(run_solver(&solver, g.bits(), &exec)?, expected);
                    }
                }
            }
            #[derive(Serialize)]
            struct AggregateResult {
                total: u64,
                correct: u64,
                all_correct: bool,
                rounds: usize,
                max_budget_used: u64,
            }
            emit(
                "solve",
                config,
                AggregateResult {
                    total,
                    correct,
                    all_correct: correct == total,
                    rounds,
                    max_budget_used,
                },
                args.out.as_deref(),
            )
        }
    }
}

// ------------------------------------------------------------- complexity --

#[derive(Copy, Clone, ValueEnum)]
enum Family {
    /// One n-cycle versus two (n/2)-cycles.
    Octc,
    /// One n-cycle versus k (n/k)-cycles; requires --k.
    Ockc,
    /// Majority promise on an odd bit count (weights (n±1)/2).
    Pmaj,
}

#[derive(Copy, Clone, ValueEnum)]
enum MeasureKind {
    /// Deterministic query depth.
    #[value(name = "D")]
    Depth,
    /// Certificate complexity.
    #[value(name = "C")]
    Certificate,
    /// δ-approximate certificate complexity; requires --delta.
    #[value(name = "Cdelta")]
    ApproxCertificate,
    /// Degree of the total indicator of the 1-instances.
    #[value(name = "deg")]
    Degree,
}

impl MeasureKind {
    fn name(self) -> &'static str {
        match self {
            MeasureKind::Depth => "D",
            MeasureKind::Certificate => "C",
            MeasureKind::ApproxCertificate => "Cdelta",
            MeasureKind::Degree => "deg",
        }
    }
}

#[derive(Args)]
struct ComplexityArgs {
    /// Promise family to measure.
    #[arg(long, value_enum)]
    family: Family,
    /// Family size: vertices for the cycle families, bits for majority.
    #[arg(long)]
    n: usize,
    /// Cycle count (family ockc only; octc fixes k = 2).
    #[arg(long)]
    k: Option<usize>,
    /// Measure to compute.
    #[arg(long, value_enum)]
    measure: MeasureKind,
    /// Error mass for Cdelta, in [0, 1/2); `p/q` or a decimal.
    #[arg(long)]
    delta: Option<String>,
    /// Report file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct ComplexityConfig {
    family: &'static str,
    n: usize,
    k: Option<usize>,
    bits: usize,
    measure: &'static str,
    delta: Option<String>,
    out: Option<String>,
}

#[derive(Serialize)]
struct CertificateWitness {
    /// Promise input attaining the maximum, as hex over the slot string.
    instance: String,
    /// Slots of its least minimum certificate.
    slots: Vec<usize>,
}

#[derive(Serialize)]
struct ComplexityResult {
    measure: &'static str,
    value: usize,
    witness: Option<CertificateWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error_set_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    candidates: Option<u128>,
}

/// Degree guard: the indicator table has 2^bits entries.
const DEGREE_MAX_BITS: usize = 20;

fn build_family(family: Family, n: usize, k: Option<usize>) -> Result<(PromiseFunction, Option<usize>)> {
    match family {
        Family::Octc => {
            if k.is_some_and(|k| k != 2) {
                return Err(Error::invalid("family octc fixes k = 2; use --family ockc"));
            }
            Ok((enumerate_ockc(n, 2)?, Some(2)))
        }
        Family::Ockc => {
            let k = k.ok_or_else(|| Error::invalid("family ockc requires --k"))?;
            Ok((enumerate_ockc(n, k)?, Some(k)))
        }
        Family::Pmaj => {
            if k.is_some() {
                return Err(Error::invalid("family pmaj takes no --k"));
            }
            Ok((promise_majority(n)?, None))
        }
    }
}

fn cmd_complexity(args: ComplexityArgs) -> Result<()> {
    let (f, k) = build_family(args.family, args.n, args.k)?;
    let family_name = match args.family {
        Family::Octc => "octc",
        Family::Ockc => "ockc",
        Family::Pmaj => "pmaj",
    };
    let config = ComplexityConfig {
        family: family_name,
        n: args.n,
        k,
        bits: f.n_bits(),
        measure: args.measure.name(),
        delta: args.delta.clone(),
        out: args.out.as_deref().map(path_string),
    };

    let mut result = ComplexityResult {
        measure: args.measure.name(),
        value: 0,
        witness: None,
        error_set_size: None,
        candidates: None,
    };
    match args.measure {
        MeasureKind::Depth => {
            if args.delta.is_some() {
                return Err(Error::invalid("--delta applies to Cdelta only"));
            }
            result.value = det_query_complexity(&f)?;
        }
        MeasureKind::Certificate => {
            if args.delta.is_some() {
                return Err(Error::invalid("--delta applies to Cdelta only"));
            }
            let report = certificate_complexity(&f)?;
            result.value = report.value;
            result.witness = Some(CertificateWitness {
                instance: report.witness_instance.to_hex(),
                slots: report.witness_slots,
            });
        }
        MeasureKind::ApproxCertificate => {
            let text = args
                .delta
                .as_deref()
                .ok_or_else(|| Error::invalid("measure Cdelta requires --delta"))?;
            let delta = parse_rational(text)?;
            if delta < BigRational::zero() || delta >= BigRational::new(BigInt::from(1), BigInt::from(2)) {
                return Err(Error::invalid(format!("--delta must lie in [0, 1/2), got {text}")));
            }
            let report = approx_certificate_complexity(&f, &delta)?;
            result.value = report.value;
            result.error_set_size = Some(report.error_set.len());
            result.candidates = Some(report.candidates);
        }
        MeasureKind::Degree => {
            if args.delta.is_some() {
                return Err(Error::invalid("--delta applies to Cdelta only"));
            }
            let bits = f.n_bits();
            if bits > DEGREE_MAX_BITS {
                return Err(Error::invalid(format!(
                    "degree interpolates a 2^{bits}-entry table; the guard is {DEGREE_MAX_BITS} bits"
                )));
            }
            let ones: HashSet<u32> = f
                .ones()
                .iter()
                .map(|x| x.iter_ones().fold(0u32, |m, i| m | 1 << i))
                .collect();
            result.value = CubeTable::from_fn(bits, |point| ones.contains(&point)).degree();
        }
    }
    emit("complexity", config, result, args.out.as_deref())
}

// ---------------------------------------------------------------- extract --

#[derive(Args)]
struct ExtractArgs {
    /// Vertex count of the solver to extract.
    #[arg(long)]
    n: usize,
    /// Cycle count of the 0-class.
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[command(flatten)]
    capacity: CapacityArgs,
    /// Walk-anchor seed; omitted = the deterministic anchor (vertex 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Report file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct ExtractConfig {
    n: usize,
    k: usize,
    s: u64,
    eps: Option<String>,
    seed: Option<u64>,
    bits: usize,
    out: Option<String>,
}

#[derive(Serialize)]
struct AuditLine {
    round: usize,
    subject: String,
    degree: usize,
    bound: u128,
    ok: bool,
}

#[derive(Serialize)]
struct ExtractResult {
    rounds: usize,
    degree: usize,
    degree_bound: u128,
    term_count: usize,
    audits_ok: bool,
    audits: Vec<AuditLine>,
    polynomial: Vec<DumpEntry>,
}

fn cmd_extract(args: ExtractArgs) -> Result<()> {
    let bits = slot_count(args.n);
    let capacity = args.capacity.resolve(args.n as u64)?;
    let solver = match args.seed {
        Some(seed) => solve_ockc(args.n, args.k, capacity.s, false)?.with_seed(seed),
        None => solve_ockc(args.n, args.k, capacity.s, true)?,
    };
    let config = ExtractConfig {
        n: args.n,
        k: args.k,
        s: capacity.s,
        eps: capacity.eps,
        seed: args.seed,
        bits,
        out: args.out.as_deref().map(path_string),
    };
    let options = ExtractOptions {
        max_vars: bits,
        ..ExtractOptions::default()
    };
    let extraction = extract_polynomial(&solver, capacity.s, &options)?;
    let result = ExtractResult {
        rounds: extraction.rounds,
        degree: extraction.degree,
        degree_bound: extraction.degree_bound,
        term_count: extraction.polynomial.term_count(),
        audits_ok: extraction.audits_ok(),
        audits: extraction
            .audits
            .iter()
            .map(|row| AuditLine {
                round: row.round,
                subject: row.subject.clone(),
                degree: row.degree,
                bound: row.bound,
                ok: row.ok,
            })
            .collect(),
        polynomial: extraction.polynomial.dump_entries(),
    };
    emit("extract", config, result, args.out.as_deref())
}

// -------------------------------------------------------------- adversary --

#[derive(Copy, Clone, ValueEnum)]
enum StrategyKind {
    /// Ask every slot in ascending order.
    Sweep,
    /// Ask every slot in a seed-shuffled order.
    Random,
    /// Grow a path greedily, then sweep the rest.
    Walk,
}

#[derive(Args)]
struct AdversaryArgs {
    /// Vertex count.
    #[arg(long)]
    n: usize,
    /// Cycle count of the 0-class.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Querier to play against the environment.
    #[arg(long, value_enum, default_value_t = StrategyKind::Sweep)]
    strategy: StrategyKind,
    /// Shuffle seed (strategy random only).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Commit to k short cycles instead of one full cycle.
    #[arg(long)]
    split: bool,
    /// Report file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct AdversaryConfig {
    n: usize,
    k: usize,
    strategy: &'static str,
    seed: u64,
    split: bool,
    out: Option<String>,
}

fn cmd_adversary(args: AdversaryArgs) -> Result<()> {
    let strategy_name = match args.strategy {
        StrategyKind::Sweep => "sweep",
        StrategyKind::Random => "random",
        StrategyKind::Walk => "walk",
    };
    let config = AdversaryConfig {
        n: args.n,
        k: args.k,
        strategy: strategy_name,
        seed: args.seed,
        split: args.split,
        out: args.out.as_deref().map(path_string),
    };

    let mut st = new_adversary(args.n, args.k)?;
    if args.split {
        st.prefer_split_commitment(true);
    }
    let mut strategy: Box<dyn QueryStrategy> = match args.strategy {
        StrategyKind::Sweep => Box::new(SweepStrategy::new(args.n)),
        StrategyKind::Random => Box::new(RandomStrategy::new(args.n, args.seed)),
        StrategyKind::Walk => Box::new(WalkStrategy::new(args.n)),
    };
    let game = play(&mut st, strategy.as_mut())?;

    // The one-line-per-query form is the replayable artifact; it accompanies
    // the report whenever one is written to disk.
    let trace_path = match &args.out {
        Some(out) => {
            let mut name = out.as_os_str().to_owned();
            name.push(".trace.jsonl");
            let path = PathBuf::from(name);
            let mut text = game.trace_jsonl();
            text.push('\n');
            write_atomic(&path, text.as_bytes())?;
            Some(path_string(&path))
        }
        None => None,
    };

    #[derive(Serialize)]
    struct AdversaryResult {
        queries: usize,
        yes: u64,
        no: u64,
        phase1_no_count: Option<u64>,
        final_answerable: bool,
        output: Option<bool>,
        notes: Vec<String>,
        trace_path: Option<String>,
        trace: Vec<ampc_core::adversary::TraceRecord>,
    }
    emit(
        "adversary",
        config,
        AdversaryResult {
            queries: game.queries,
            yes: game.yes,
            no: game.no,
            phase1_no_count: game.phase1_no_count,
            final_answerable: game.final_answerable,
            output: game.output,
            notes: game.notes,
            trace_path,
            trace: game.trace,
        },
        args.out.as_deref(),
    )
}

// ----------------------------------------------------------------- bounds --

#[derive(Args)]
struct BoundsArgs {
    /// Input size the bound is evaluated at.
    #[arg(long)]
    n: u64,
    #[command(flatten)]
    capacity: CapacityArgs,
    /// Evaluate the randomized-certificate route instead of the
    /// deterministic-depth route.
    #[arg(long)]
    rand: bool,
    /// Report file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct BoundsConfig {
    n: u64,
    s: u64,
    eps: Option<String>,
    rand: bool,
    out: Option<String>,
}

fn cmd_bounds(args: BoundsArgs) -> Result<()> {
    let capacity = args.capacity.resolve(args.n)?;
    let config = BoundsConfig {
        n: args.n,
        s: capacity.s,
        eps: capacity.eps,
        rand: args.rand,
        out: args.out.as_deref().map(path_string),
    };
    let report = if args.rand {
        rand_round_lower_bound(args.n, capacity.s)?
    } else {
        det_round_lower_bound(args.n, capacity.s)?
    };
    emit("bounds", config, report, args.out.as_deref())
}
