//! Command-line front end: lattice and expansion I/O, operators, verification suites.

pub mod config;
pub mod suites;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::json;

use weilhecke::heckeops::{bs_closed, op_h, op_p, op_t, op_u, Convention};
use weilhecke::qexpansion::{theta_series_scaled, VVExpansion};
use weilhecke::scalars::{fmt_fraction, parse_fraction};
use weilhecke::weilaction::{rho_beta_closed, rho_beta_oracle, BetaParams};
use weilhecke::{EvenLattice, FqModule, Fraction, VerificationReport};

use config::{Suite, SuiteConfig};
use suites::RunOptions;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "weilhecke", version, about = "Exact Weil representation and Hecke operator checks")]
#[command(after_help = "Exit codes: 0 success, 1 a check failed, 2 usage or config error.\n\
The falsifier suite inverts the usual convention: finding a counterexample is success,\n\
and the suite fails when no witness is found.")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct LatticeArgs {
    /// A1, A1+A1, A2 or E8
    #[arg(long, conflicts_with = "gram")]
    pub lattice: Option<String>,
    /// Gram matrix as JSON, e.g. [[2,1],[1,2]]
    #[arg(long)]
    pub gram: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Write the result to FILE (atomically) instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Emit JSON on standard output
    #[arg(long)]
    pub json: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the discriminant module L(n)'/L(n)
    DescribeModule {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long, default_value_t = 1)]
        scale: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compute a theta series
    Theta {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long, default_value_t = 1)]
        scale: u64,
        #[arg(long)]
        precision: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Matrix of the Weil action of β_{h,s}
    WeilBeta {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        s: u32,
        #[arg(long)]
        h: u64,
        #[arg(long, group = "method")]
        closed: bool,
        #[arg(long, group = "method")]
        oracle: bool,
        /// Compute both and compare
        #[arg(long, group = "method")]
        both: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Apply an operator descriptor to an expansion file
    Apply {
        /// Expansion file
        #[arg(long)]
        input: PathBuf,
        /// Descriptor JSON or a file holding it, e.g. {"op": "H", "n": 2}
        #[arg(long)]
        op: String,
        /// literal, selected, or up/projection such as base/sum
        #[arg(long, default_value = "selected")]
        convention: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run verification suites from a config (the shipped default grid when omitted)
    Verify {
        /// Restrict to one suite
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the output precision of every case
        #[arg(long)]
        precision: Option<String>,
        /// Record wall-clock time per case (makes reports nondeterministic)
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct Descriptor {
    op: String,
    #[serde(default)]
    n: Option<u64>,
    #[serde(default)]
    p: Option<u64>,
    #[serde(default)]
    l: Option<u32>,
    #[serde(default)]
    s: Option<u32>,
}

/// A failure carrying its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Compute(_) => EXIT_FAIL,
        }
    }
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

fn compute(e: impl ToString) -> CliError {
    CliError::Compute(e.to_string())
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}

fn lattice_of(a: &LatticeArgs) -> Result<EvenLattice, CliError> {
    match (&a.lattice, &a.gram) {
        (Some(n), _) => EvenLattice::by_name(n).ok_or_else(|| usage(format!("unknown lattice {n:?}"))),
        (None, Some(g)) => {
            let g: Vec<Vec<i64>> = serde_json::from_str(g).map_err(usage)?;
            EvenLattice::new(g, None).map_err(usage)
        }
        (None, None) => Err(usage("give --lattice or --gram")),
    }
}

fn fraction(s: &str) -> Result<Fraction, CliError> {
    parse_fraction(s).map_err(usage)
}

/// Writes via a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn emit(output: &OutputArgs, json_text: &str, human: impl FnOnce() -> String) -> Result<(), CliError> {
    if let Some(p) = &output.out {
        write_atomic(p, &format!("{json_text}\n")).map_err(usage)?;
    }
    if output.json {
        println!("{json_text}");
    } else if output.out.is_none() {
        print!("{}", human());
    }
    Ok(())
}

fn execute(cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::DescribeModule { lattice, scale, output } => {
            let lat = lattice_of(&lattice)?;
            let m = FqModule::build(&lat, scale).map_err(usage)?;
            let elements = m.enumerate().map_err(compute)?;
            let rows: Vec<_> = elements
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    json!({"index": i, "coords": x.to_strings(), "q": fmt_fraction(&m.q_value(x).expect("member"))})
                })
                .collect();
            let v = json!({
                "lattice": lat.name(),
                "scale": scale,
                "order": m.order(),
                "divisors": m.divisors(),
                "elements": rows,
            });
            let text = serde_json::to_string_pretty(&v).expect("serializes");
            emit(&output, &text, || {
                let mut s = format!(
                    "{} at scale {}: order {}, invariants {:?}\n",
                    lat.name(),
                    scale,
                    m.order(),
                    m.divisors()
                );
                for (i, x) in elements.iter().enumerate() {
                    s += &format!("{i:>6}  {x}  q = {}\n", fmt_fraction(&m.q_value(x).expect("member")));
                }
                s
            })?;
            Ok(EXIT_OK)
        }
        Command::Theta { lattice, scale, precision, output } => {
            let lat = lattice_of(&lattice)?;
            let prec = fraction(&precision)?;
            let f = theta_series_scaled(&lat, scale, &prec).map_err(usage)?;
            let text = f.to_json();
            emit(&output, &text, || format!("{text}\n"))?;
            Ok(EXIT_OK)
        }
        Command::WeilBeta { lattice, p, l, s, h, closed, oracle, both, output } => {
            let lat = lattice_of(&lattice)?;
            let b = BetaParams::new(p, l, s, h).map_err(usage)?;
            let (closed, oracle) = match (closed, oracle, both) {
                (_, false, false) => (true, false),
                (_, true, false) => (false, true),
                _ => (true, true),
            };
            let c = closed.then(|| rho_beta_closed(&lat, &b)).transpose().map_err(compute)?;
            let o = oracle.then(|| rho_beta_oracle(&lat, &b)).transpose().map_err(compute)?;
            let (v, code) = match (&c, &o) {
                (Some(c), Some(o)) => {
                    let diff = c.diff(o);
                    let v = json!({
                        "closed": c.to_record(),
                        "oracle": o.to_record(),
                        "equal": diff.is_empty(),
                        "differences": diff.len(),
                    });
                    (v, if diff.is_empty() { EXIT_OK } else { EXIT_FAIL })
                }
                (Some(m), None) | (None, Some(m)) => (serde_json::to_value(m.to_record()).expect("serializes"), EXIT_OK),
                (None, None) => unreachable!(),
            };
            let text = serde_json::to_string_pretty(&v).expect("serializes");
            emit(&output, &text, || format!("{text}\n"))?;
            Ok(code)
        }
        Command::Apply { input, op, convention, output } => {
            let text = std::fs::read_to_string(&input).map_err(|e| usage(format!("{}: {e}", input.display())))?;
            let f = VVExpansion::from_json(&text).map_err(usage)?;
            let desc_text = if Path::new(&op).is_file() {
                std::fs::read_to_string(&op).map_err(usage)?
            } else {
                op
            };
            let d: Descriptor = serde_json::from_str(&desc_text).map_err(usage)?;
            let conv = Convention::parse(&convention).map_err(usage)?;
            let need_n = || d.n.ok_or_else(|| usage("descriptor needs n"));
            let result = match d.op.as_str() {
                "T" => op_t(&f, need_n()?),
                "U" => op_u(&f, need_n()?, conv),
                "P" => op_p(&f, need_n()?, conv),
                "H" => op_h(&f, need_n()?, conv),
                "bs" => {
                    let (p, l, s) = match (d.p, d.l, d.s) {
                        (Some(p), Some(l), Some(s)) => (p, l, s),
                        _ => return Err(usage("descriptor bs needs p, l and s")),
                    };
                    bs_closed(&f, p, l, s)
                }
                other => return Err(usage(format!("unknown operator {other:?}"))),
            };
            let g = result.map_err(|e| match e {
                weilhecke::Error::PNotOdd(_)
                | weilhecke::Error::RangeError(_)
                | weilhecke::Error::ModuleMismatch(_)
                | weilhecke::Error::UnsupportedExponent(_) => usage(e),
                other => compute(other),
            })?;
            let text = g.to_json();
            emit(&output, &text, || format!("{text}\n"))?;
            Ok(EXIT_OK)
        }
        Command::Verify { suite, config, precision, timing, output } => {
            let cfg = SuiteConfig::load(config.as_deref()).map_err(usage)?;
            let opts = RunOptions {
                precision: precision.as_deref().map(fraction).transpose()?,
                timing,
            };
            let cases: Vec<_> = cfg.cases.iter().filter(|c| suite.map_or(true, |s| c.suite == s)).collect();
            if cases.is_empty() {
                return Err(usage("the config has no cases for the requested suite"));
            }
            let reports = cases.par_iter().map(|c| suites::run_case(c, &opts)).collect();
            let report = VerificationReport {
                suite: match suite {
                    Some(s) => format!("{}:{s}", cfg.id),
                    None => cfg.id.clone(),
                },
                cases: reports,
            };
            let text = serde_json::to_string_pretty(&report).expect("serializes");
            emit(&output, &text, || table(&report))?;
            Ok(if report.passed() { EXIT_OK } else { EXIT_FAIL })
        }
    }
}

fn table(r: &VerificationReport) -> String {
    let mut s = format!("suite {}\n", r.suite);
    for (i, c) in r.cases.iter().enumerate() {
        let status = serde_json::to_value(c.status).expect("serializes");
        let params = serde_json::to_string(&c.params).expect("serializes");
        s += &format!(
            "{i:>3}  {:<17} {:<15} mismatches {:<4} {params}\n",
            c.case,
            status.as_str().unwrap_or("?"),
            c.mismatches.len()
        );
        for (k, v) in &c.constants {
            s += &format!("       {k} = {v}\n");
        }
        for n in &c.notes {
            s += &format!("       note: {n}\n");
        }
    }
    s += &format!("overall: {}\n", if r.passed() { "pass" } else { "fail" });
    s
}
