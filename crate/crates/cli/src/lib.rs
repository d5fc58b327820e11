//! The `nlqc` command line: build protocol descriptors along compiler chains,
//! verify descriptors exhaustively, sweep function families and search for
//! minimal garden-hose strategies.

pub mod chain;
pub mod report;
pub mod sweep;

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nlqc_core::boolfn::{self, BoolFn};
use nlqc_core::classical::verify::DEFAULT_BUDGET;
use nlqc_core::descriptor::ProtocolDescriptor;
use nlqc_core::gardenhose::gh_search;
use serde::Serialize;

use chain::{build, parse_chain, qr_function, BuildLimits};
use report::{is_budget, verify_descriptor, Verdict, VerifyConfig};
use sweep::{run_sweep, to_csv, Family, SweepConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Bad flags, names or chains.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Parser)]
#[command(name = "nlqc", version, about = "Compile and exactly verify CDS, PSM, CDQS, PSQM and f-routing protocols")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile a function along a chain and write the protocol descriptor.
    Build(BuildArgs),
    /// Rebuild a descriptor and run its verifier exhaustively.
    Verify(VerifyArgs),
    /// Verify a whole function family.
    Sweep(SweepArgs),
    /// Find a minimal garden-hose strategy.
    Search(SearchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct FnArgs {
    /// Named function (and1, or2, xor1, eq1, ip2, index1, thr2of3, qr) or a JSON function file.
    #[arg(long = "fn")]
    pub function: Option<String>,
    /// Truth table in hex, bit `x * 2^n_y + y` holds f(x, y).
    #[arg(long)]
    pub table: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub n_x: u32,
    #[arg(long, default_value_t = 1)]
    pub n_y: u32,
    /// Modulus for `--fn qr`.
    #[arg(long)]
    pub p: Option<u64>,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub function: FnArgs,
    /// Compiler chain, e.g. gh,cds,cdqs,frouting.
    #[arg(long)]
    pub chain: String,
    #[arg(long, default_value_t = 4)]
    pub max_pipes: u32,
    #[arg(long, default_value_t = 14)]
    pub max_qubits: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Descriptor written by `build`.
    pub descriptor: PathBuf,
    /// Cap on enumerated states.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 14)]
    pub max_qubits: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long, default_value_t = 3)]
    pub max_pipes: u32,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Only the first N functions of the family.
    #[arg(long)]
    pub limit: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub function: FnArgs,
    #[arg(long, default_value_t = 4)]
    pub max_pipes: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// What a command printed and how the process should exit.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn split_name(name: &str) -> (&str, Option<u32>) {
    let cut = name.find(|c: char| c.is_ascii_digit()).unwrap_or(name.len());
    let (head, digits) = name.split_at(cut);
    (head, digits.parse().ok())
}

pub fn resolve_function(args: &FnArgs) -> Result<BoolFn> {
    if let Some(hex) = &args.table {
        if args.function.is_some() {
            return Err(usage("give either --fn or --table"));
        }
        return Ok(BoolFn::from_hex(args.n_x, args.n_y, hex)?);
    }
    let Some(name) = &args.function else {
        return Err(usage("a function is required: --fn NAME|FILE or --table HEX"));
    };
    let lower = name.to_ascii_lowercase();
    let named = match (lower.as_str(), split_name(&lower)) {
        ("qr", _) => {
            let p = args.p.ok_or_else(|| usage("--fn qr needs --p"))?;
            Some(qr_function(p)?)
        }
        ("thr2of3", _) => Some(boolfn::threshold(1, 2, 2)),
        (_, ("and", Some(n))) => Some(boolfn::and(n)),
        (_, ("or", Some(n))) => Some(boolfn::or(n)),
        (_, ("xor", Some(n))) => Some(boolfn::xor(n)),
        (_, ("eq", Some(n))) => Some(boolfn::eq(n)),
        (_, ("ip", Some(n))) => Some(boolfn::ip(n)),
        (_, ("index", Some(n))) => Some(boolfn::index(n)?),
        _ => None,
    };
    if let Some(f) = named {
        return Ok(f);
    }
    let path = Path::new(name);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return Ok(BoolFn::from_json(&text)?);
    }
    Err(usage(format!(
        "unknown function {name:?}; use and<n>, or<n>, xor<n>, eq<n>, ip<n>, index<n>, thr2of3, qr or a JSON file"
    )))
}

fn emit(out: &Option<PathBuf>, text: String) -> Result<String> {
    match out {
        Some(path) => {
            std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn pretty(value: &impl Serialize) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

fn cmd_build(a: &BuildArgs) -> Result<Outcome> {
    let chain = parse_chain(&a.chain)?;
    let f = resolve_function(&a.function)?;
    let d = build(&f, &chain, BuildLimits { max_pipes: a.max_pipes, max_qubits: a.max_qubits })?;
    let mut text = d.to_json_pretty();
    text.push('\n');
    Ok(Outcome { code: EXIT_PASS, output: emit(&a.out, text)? })
}

fn report_csv(r: &report::Report) -> Result<String> {
    #[derive(Serialize)]
    struct Row<'a> {
        function: &'a str,
        kind: &'a str,
        compiler: &'a str,
        verdict: &'a str,
        worst_error: Option<String>,
        worst_security: Option<String>,
        randomness_bits: u64,
        communication_bits: u64,
        message_qubits: Option<u64>,
        epr_pairs: Option<u64>,
        bounds_pass: bool,
    }
    let kind = serde_json::to_value(r.kind)?;
    let verdict = serde_json::to_value(r.verdict)?;
    let (err, sec) = match (&r.classical, &r.quantum) {
        (Some(c), _) => (
            Some(format!("{}/{}", c.eps_hat.num, c.eps_hat.den)),
            Some(format!("{}/{}", c.delta_pair.num, c.delta_pair.den)),
        ),
        (_, Some(q)) => {
            (Some(format!("{:e}", q.worst_correctness_infidelity)), Some(format!("{:e}", q.worst_security_gap)))
        }
        _ => (None, None),
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.serialize(Row {
        function: &r.function,
        kind: kind.as_str().unwrap_or_default(),
        compiler: &r.compiler,
        verdict: verdict.as_str().unwrap_or_default(),
        worst_error: err,
        worst_security: sec,
        randomness_bits: r.resources.randomness_bits,
        communication_bits: r.resources.communication_bits,
        message_qubits: r.resources.message_qubits,
        epr_pairs: r.resources.epr_pairs,
        bounds_pass: r.bounds.iter().all(|b| b.pass),
    })?;
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn cmd_verify(a: &VerifyArgs) -> Result<Outcome> {
    let text = std::fs::read_to_string(&a.descriptor).with_context(|| format!("reading {}", a.descriptor.display()))?;
    let d = ProtocolDescriptor::from_json(&text).map_err(|e| usage(format!("bad descriptor: {e}")))?;
    let r = verify_descriptor(&d, VerifyConfig { budget: a.budget, seed: a.seed, max_qubits: a.max_qubits })?;
    let code = match r.verdict {
        Verdict::Pass => EXIT_PASS,
        Verdict::Fail => EXIT_FAIL,
        Verdict::BudgetExceeded => EXIT_BUDGET,
    };
    let body = match a.format {
        Format::Json => pretty(&r)?,
        Format::Csv => report_csv(&r)?,
    };
    Ok(Outcome { code, output: emit(&a.out, body)? })
}

fn cmd_sweep(a: &SweepArgs) -> Result<Outcome> {
    let cfg = SweepConfig { family: a.family, max_pipes: a.max_pipes, budget: a.budget, seed: a.seed, limit: a.limit };
    let r = run_sweep(&cfg)?;
    let code = if r.ok() { EXIT_PASS } else { EXIT_FAIL };
    let body = match a.format {
        Format::Json => pretty(&r)?,
        Format::Csv => to_csv(&r)?,
    };
    Ok(Outcome { code, output: emit(&a.out, body)? })
}

fn cmd_search(a: &SearchArgs) -> Result<Outcome> {
    #[derive(Serialize)]
    struct Found {
        function: String,
        max_pipes: u32,
        /// Fewest pipes; every smaller count was ruled out exhaustively.
        pipes: Option<u32>,
        strategy: Option<serde_json::Value>,
    }
    let f = resolve_function(&a.function)?;
    let s = gh_search(&f, a.max_pipes)?;
    let found = Found {
        function: f.label(),
        max_pipes: a.max_pipes,
        pipes: s.as_ref().map(|s| s.pipes()),
        strategy: s.as_ref().map(|s| s.to_json_value()),
    };
    let code = if s.is_some() { EXIT_PASS } else { EXIT_FAIL };
    Ok(Outcome { code, output: emit(&a.out, pretty(&found)?)? })
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Search(a) => cmd_search(a),
    }
}

/// Exit code for an error that stopped a command.
pub fn error_code(e: &anyhow::Error) -> i32 {
    if is_budget(e) {
        EXIT_BUDGET
    } else {
        EXIT_USAGE
    }
}
