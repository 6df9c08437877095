//! Command-line front end for the ternary inclusion-exclusion toolkit.
//!
//! Subcommands mirror the library surface: `profile` computes exact
//! coefficient statistics, `predict` evaluates the closed forms, `solve`
//! constructs witness triples for height and diameter targets,
//! `verify-corpus` sweeps the structural invariants over an enumerated
//! family, `audit` re-checks the window identities empirically, and `bench`
//! times the streaming engine.
//!
//! Output is newline-delimited JSON ([`record::OutputRecord`]). Exit codes:
//! 0 on success, 1 when a verification or audit check fails, 2 for invalid
//! usage or out-of-domain parameters.

mod compute;
mod pool;
mod record;
mod suites;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use record::Emitter;

#[derive(Parser)]
#[command(
    name = "inex",
    version,
    about = "Exact coefficient analysis of ternary inclusion-exclusion polynomials"
)]
struct Cli {
    /// Omit the unix_time field so identical inputs give identical bytes.
    #[arg(long, global = true)]
    no_timestamp: bool,

    /// TOML preset file (keys: cap-degree, cap-search, jobs). Command-line
    /// flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute degree, height, diameter, and the coefficient set of one
    /// polynomial.
    Profile(ProfileArgs),
    /// Evaluate the closed-form case prediction for a conforming triple.
    Predict(PredictArgs),
    /// Construct a triple realizing a height or diameter target.
    #[command(subcommand)]
    Solve(SolveCommand),
    /// Check structural invariants across every coprime triple in a box.
    VerifyCorpus(VerifyCorpusArgs),
    /// Re-check window identities over a triple corpus.
    Audit(AuditArgs),
    /// Time the streaming engine on a large-degree polynomial.
    Bench(BenchArgs),
}

#[derive(Args)]
struct ProfileArgs {
    p: u64,
    q: u64,
    r: u64,
    /// Stream coefficients in degree-independent memory (the default).
    #[arg(long, conflicts_with_all = ["oracle", "both"])]
    engine: bool,
    /// Materialize the coefficient vector by exact polynomial division.
    #[arg(long, conflicts_with = "both")]
    oracle: bool,
    /// Run both routes and require coefficientwise agreement.
    #[arg(long)]
    both: bool,
    /// Also write the coefficients as CSV (columns m,a_m) to PATH.
    #[arg(long, value_name = "PATH")]
    emit_coeffs: Option<PathBuf>,
    /// Refuse degrees above N on the materialized routes.
    #[arg(long, value_name = "N")]
    cap_degree: Option<u64>,
}

#[derive(Args)]
struct PredictArgs {
    p: u64,
    /// Residue class of q modulo p; must match the supplied q.
    t: u64,
    q: u64,
    r: u64,
    /// Reject triples outside the proven parameter range (the default).
    #[arg(long, conflicts_with = "no_strict")]
    strict: bool,
    /// Accept heuristic extrapolation, then verify against the engine.
    #[arg(long)]
    no_strict: bool,
    /// Refuse verification degrees above N.
    #[arg(long, value_name = "N")]
    cap_degree: Option<u64>,
}

#[derive(Subcommand)]
enum SolveCommand {
    /// Find a conforming triple whose polynomial has the given height.
    Height {
        p: u64,
        height: u64,
        #[command(flatten)]
        opts: SolveFlags,
    },
    /// Find a conforming triple with the given diameter for this p.
    Diameter {
        p: u64,
        diameter: u64,
        #[command(flatten)]
        opts: SolveFlags,
    },
    /// Find some p together with a triple realizing an odd diameter.
    DiameterAnyP {
        diameter: u64,
        #[command(flatten)]
        opts: SolveFlags,
    },
}

#[derive(Args)]
struct SolveFlags {
    /// Require the third member r to be prime instead of merely minimal.
    #[arg(long)]
    prime_r: bool,
    /// Check the witness against a computed profile before reporting it.
    #[arg(long)]
    verify: bool,
    /// Refuse verification degrees above N.
    #[arg(long, value_name = "N")]
    cap_degree: Option<u64>,
    /// Candidate budget for the prime searches.
    #[arg(long, value_name = "N")]
    cap_search: Option<u64>,
}

#[derive(Args)]
struct VerifyCorpusArgs {
    /// Largest allowed smallest member.
    pmax: u64,
    /// Largest allowed middle member.
    qmax: u64,
    /// Largest allowed largest member.
    rmax: u64,
    /// Worker threads (default: available parallelism).
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
}

#[derive(Args)]
struct AuditArgs {
    /// Identity checks to run.
    #[arg(required = true, value_enum, ignore_case = true)]
    ids: Vec<AuditSelector>,
    /// Sweep all coprime triples from [3, 40] in every role rotation.
    #[arg(long, conflicts_with_all = ["conforming", "triple"])]
    all_small: bool,
    /// Audit family for one or more p values (accepts `5` or `p=5`).
    #[arg(long, value_name = "P", value_parser = parse_p_value, conflicts_with = "triple")]
    conforming: Vec<u64>,
    /// One explicit triple.
    #[arg(long, num_args = 3, value_names = ["P", "Q", "R"])]
    triple: Option<Vec<u64>>,
    /// Worker threads (default: available parallelism).
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
}

#[derive(Args)]
struct BenchArgs {
    /// Target degree; plain integers and scientific notation both work.
    #[arg(long, default_value = "5e7", value_parser = parse_degree)]
    degree: u64,
}

/// Audit identifiers as command-line values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AuditSelector {
    L5,
    L6,
    L10,
    L11,
    L12,
    L14,
    MaxS,
}

impl AuditSelector {
    fn id(self) -> inex::AuditId {
        match self {
            AuditSelector::L5 => inex::AuditId::L5,
            AuditSelector::L6 => inex::AuditId::L6,
            AuditSelector::L10 => inex::AuditId::L10,
            AuditSelector::L11 => inex::AuditId::L11,
            AuditSelector::L12 => inex::AuditId::L12,
            AuditSelector::L14 => inex::AuditId::L14,
            AuditSelector::MaxS => inex::AuditId::MaxS,
        }
    }
}

fn parse_p_value(s: &str) -> Result<u64, String> {
    let digits = s.strip_prefix("p=").unwrap_or(s);
    digits
        .parse()
        .map_err(|_| format!("expected a number or p=NUMBER, got {s:?}"))
}

fn parse_degree(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = s
        .parse()
        .map_err(|_| format!("expected an integer or scientific notation, got {s:?}"))?;
    if !x.is_finite() || x < 1.0 || x > 1e15 {
        return Err(format!("degree {s} is outside [1, 1e15]"));
    }
    Ok(x.round() as u64)
}

/// Preset file contents; every key optional.
#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct Config {
    cap_degree: Option<u64>,
    cap_search: Option<u64>,
    jobs: Option<usize>,
}

fn load_config(path: Option<&Path>) -> Result<Config, Failure> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Validation(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| Failure::Validation(format!("bad config {}: {e}", path.display())))
}

/// What went wrong, split by exit code.
pub enum Failure {
    /// Exit 2: arguments or parameters outside the supported domain.
    Validation(String),
    /// Exit 1: a computed result contradicted a required property.
    Check(String),
}

impl From<inex::Error> for Failure {
    fn from(e: inex::Error) -> Self {
        match e {
            inex::Error::VerificationFailed(_) => Failure::Check(e.to_string()),
            other => Failure::Validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Validation(format!("i/o error: {e}"))
    }
}

pub type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> CmdResult {
    let config = load_config(cli.config.as_deref())?;
    let emitter = Emitter::new(cli.no_timestamp);
    match cli.command {
        Command::Profile(args) => compute::profile(&args, &config, &emitter),
        Command::Predict(args) => compute::predict(&args, &config, &emitter),
        Command::Solve(args) => compute::solve(&args, &config, &emitter),
        Command::VerifyCorpus(args) => suites::verify_corpus(&args, &config, &emitter),
        Command::Audit(args) => suites::audit(&args, &config, &emitter),
        Command::Bench(args) => suites::bench(&args, &emitter),
    }
}
