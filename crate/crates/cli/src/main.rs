//! `hdt`: Hermitian symmetric pairs and the holomorphic discrete series.
//!
//! Exit codes: 0 success (criterion: the series exists), 1 verification or
//! numerical failure, 2 usage error, 3 criterion negative.

mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hdt_core::cascade::PairStructure;
use hdt_core::convergence::{classify_convergence, ConvergenceOptions, DEFAULT_LADDER};
use hdt_core::criterion::{hc_condition, HighestWeightInput};
use hdt_core::exact::{format_rational, parse_decimal};
use hdt_core::hermitian::{catalog, lookup};
use hdt_core::suite::{run_all, run_exact, run_numeric_with, DISC_SAMPLES};
use hdt_core::weights::{lambda0_from_compact, weight_system};
use hdt_core::Error;
use serde::Serialize;

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NEGATIVE: u8 = 3;
const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scope {
    Exact,
    Numeric,
    All,
}

#[derive(Debug, Parser)]
#[command(name = "hdt", version, about = "Hermitian symmetric pairs and the holomorphic discrete series")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "table", global = true)]
    output: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List every catalog pair with (r, a, b, p), dim p+ and restricted type.
    Catalog,
    /// Cascade, restricted multiplicities and rho identities of one pair.
    Analyze { pair: String },
    /// Decide existence of the holomorphic discrete series.
    Criterion {
        pair: String,
        /// Central parameter as a plain decimal (no exponent).
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        /// Compact highest weight in fundamental-weight coordinates, in the
        /// compact node order printed by `analyze`.
        #[arg(long, allow_hyphen_values = true)]
        lambda0: Option<String>,
    },
    /// Truncated convergence integrals on an epsilon ladder.
    Integrate {
        pair: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda0: Option<String>,
        /// Comma-separated truncations, e.g. 1e-2,1e-3,1e-4.
        #[arg(long)]
        eps: Option<String>,
        /// Gauss-Legendre points per cell and dimension.
        #[arg(long)]
        order: Option<usize>,
    },
    /// Run the verification suites.
    Verify {
        #[arg(value_enum, default_value = "all")]
        scope: Scope,
        /// Seed for the randomized checks; falls back to HDT_SEED.
        #[arg(long)]
        seed: Option<u64>,
        /// Monte Carlo samples for the disc checks.
        #[arg(long, default_value_t = DISC_SAMPLES)]
        samples: usize,
    },
}

enum Failure {
    Usage(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownPair(_)
            | Error::InvalidWeight(_)
            | Error::InvalidDecimal(_)
            | Error::Configuration(_)
            | Error::DimensionMismatch { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Verification(e.to_string()),
        }
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn print_json<T: Serialize>(v: &T) {
    emit(&format!("{}\n", serde_json::to_string_pretty(v).expect("reports serialize")));
}

fn structure(label: &str) -> Result<PairStructure, Failure> {
    let pair = lookup(label)?;
    Ok(PairStructure::analyze(&pair)?)
}

fn parse_lambda0(s: &PairStructure, text: Option<&str>) -> Result<hdt_core::weights::WeightVector, Failure> {
    let coords: Vec<i64> = match text {
        None => vec![],
        Some(t) if t.trim().is_empty() => vec![],
        Some(t) => t
            .split(',')
            .map(|x| x.trim().parse::<i64>())
            .collect::<Result<_, _>>()
            .map_err(|_| Failure::Usage(format!("lambda0 `{t}` is not a comma-separated integer list")))?,
    };
    Ok(lambda0_from_compact(s, &coords)?)
}

fn parse_eps(text: Option<&str>) -> Result<Vec<f64>, Failure> {
    let Some(t) = text else {
        return Ok(DEFAULT_LADDER.to_vec());
    };
    let v: Vec<f64> = t
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Usage(format!("eps `{t}` is not a comma-separated number list")))?;
    if v.len() < 2 || v.iter().any(|e| !(*e > 0.0 && *e < 0.5)) {
        return Err(Failure::Usage("eps needs at least two truncations in (0, 1/2)".into()));
    }
    Ok(v)
}

fn seed_from_env() -> Result<u64, Failure> {
    match std::env::var("HDT_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| Failure::Usage(format!("HDT_SEED `{v}` is not an integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let fmt = cli.output;
    match cli.command {
        Command::Catalog => {
            let rows = catalog().iter().map(PairStructure::analyze).collect::<Result<Vec<_>, _>>()?;
            match fmt {
                Format::Table => emit(&output::catalog_table(&rows)),
                Format::Json => print_json(&output::catalog_json(&rows)),
            }
            Ok(0)
        }
        Command::Analyze { pair } => {
            let s = structure(&pair)?;
            let lines = s.rho_identities()?;
            match fmt {
                Format::Table => emit(&output::analyze_table(&s, &lines)),
                Format::Json => print_json(&output::analyze_json(&s, &lines)),
            }
            Ok(0)
        }
        Command::Criterion { pair, lambda, lambda0 } => {
            let s = structure(&pair)?;
            let l0 = parse_lambda0(&s, lambda0.as_deref())?;
            let lam = parse_decimal(&lambda)?;
            let input = HighestWeightInput::new(&s, l0, lam)?;
            let v = hc_condition(&input)?;
            match fmt {
                Format::Table => emit(&output::criterion_table(&s, &v)),
                Format::Json => print_json(&output::criterion_json(&s, &v)),
            }
            Ok(if v.exists { 0 } else { EXIT_NEGATIVE })
        }
        Command::Integrate { pair, lambda, lambda0, eps, order } => {
            let s = structure(&pair)?;
            let l0 = parse_lambda0(&s, lambda0.as_deref())?;
            let lam = parse_decimal(&lambda)?;
            let truncations = parse_eps(eps.as_deref())?;
            if order == Some(0) {
                return Err(Failure::Usage("order must be positive".into()));
            }
            let input = HighestWeightInput::new(&s, l0.clone(), lam.clone())?;
            let verdict = hc_condition(&input)?;
            let ws = weight_system(&s, &l0)?;
            let opts = ConvergenceOptions { truncations, order, multiplicities: true, value: true, ..Default::default() };
            let report = classify_convergence(&s, &ws, &lam, &opts)?;
            match fmt {
                Format::Table => emit(&output::integrate_table(&report, &verdict.threshold_exact)),
                Format::Json => print_json(&output::integrate_json(
                    &s,
                    &verdict.threshold_exact,
                    verdict.exists,
                    l0.coords().iter().map(format_rational).collect(),
                    &report,
                )),
            }
            Ok(if report.agreement == Some(false) { EXIT_FAILURE } else { 0 })
        }
        Command::Verify { scope, seed, samples } => {
            let seed = match seed {
                Some(s) => s,
                None => seed_from_env()?,
            };
            if samples == 0 {
                return Err(Failure::Usage("samples must be positive".into()));
            }
            let report = match scope {
                Scope::Exact => run_exact(),
                Scope::Numeric => run_numeric_with(seed, samples),
                Scope::All => run_all(seed, samples),
            };
            match fmt {
                Format::Table => emit(&output::verify_table(&report)),
                Format::Json => print_json(&output::verify_json(&report)),
            }
            if report.passed() {
                Ok(0)
            } else {
                for c in report.failures() {
                    eprintln!("failed check: {}", c.name);
                }
                Ok(EXIT_FAILURE)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
