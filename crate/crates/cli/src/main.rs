//! `cue-hurwitz` command-line front end.
//!
//! Every run prints one line of canonical JSON (sorted keys, exact values as
//! strings) and writes a run manifest whose digest covers those bytes.

mod verify;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use cue_hurwitz::algebra::{parse_rational, AlgebraError, QSeries, QSeriesJson, Rational};
use cue_hurwitz::hurwitz::{connected_count_content, disconnected_count_content, genus_generating_function};
use cue_hurwitz::hypergeom::{cue_cumulant_series, cue_moment_series};
use cue_hurwitz::quasimodular::{basis_dimension, euler_phi, fit_quasimodular, FitError};
use cue_hurwitz::symgroup::{
    count_monotone_connected, count_monotone_disconnected, Budget, MonotonePattern, OracleError,
};

use verify::VerifyArgs;

#[derive(Parser)]
#[command(
    name = "cue-hurwitz",
    version,
    about = "CUE moments, monotone Hurwitz numbers and quasimodular fits"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Manifest path (default: `<out>.manifest.json`, or stderr without `--out`).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count monotone Hurwitz factorizations with torus target.
    Hurwitz(HurwitzArgs),
    /// Expand moment, cumulant or genus generating series.
    Expand(ExpandArgs),
    /// Fit a q-series against quasimodular forms.
    Fit(FitArgs),
    /// Check one of the exact or numerical identities.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Oracle,
    Content,
}

#[derive(Args)]
struct HurwitzArgs {
    #[arg(long)]
    d: usize,
    /// Block lengths, e.g. '{"e":[1],"h":[2]}'.
    #[arg(long)]
    pattern: String,
    #[arg(long, value_enum, default_value = "content")]
    mode: Mode,
    #[arg(long)]
    connected: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Moments,
    Cumulants,
    /// The ħ^{2g-2} layer as a q-series at fixed parameters.
    Genus,
}

#[derive(Args)]
struct ExpandArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long = "m", default_value_t = 0)]
    m: usize,
    #[arg(long = "n", default_value_t = 1)]
    n: usize,
    #[arg(long)]
    dmax: usize,
    #[arg(long, default_value_t = 2)]
    horder: usize,
    /// Genus, for `--kind genus`.
    #[arg(long)]
    g: Option<usize>,
    /// Take the connected series for `--kind genus`.
    #[arg(long)]
    connected: bool,
    /// Multiply by φ(q) for `--kind genus`.
    #[arg(long)]
    phi: bool,
    /// Comma-separated u then v values for `--kind genus` (default all 1).
    #[arg(long)]
    at: Option<String>,
}

#[derive(Args)]
struct FitArgs {
    /// JSON file `{"D": int, "coeffs": ["p/q", ...]}`.
    #[arg(long)]
    series: PathBuf,
    #[arg(long)]
    weight_cap: u32,
    #[arg(long, default_value_t = 15)]
    validate: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    AssertionFailed = 1,
    Usage = 2,
    BudgetExceeded = 3,
}

pub struct Outcome {
    pub output: Value,
    pub status: Status,
    pub seeds: Vec<u64>,
}

impl Outcome {
    pub fn success(output: Value) -> Self {
        Outcome {
            output,
            status: Status::Success,
            seeds: Vec::new(),
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Budget { estimate: u128, budget: u128 },
    Failure(String),
}

impl CliError {
    fn into_outcome(self) -> Outcome {
        let (status, output) = match self {
            CliError::Usage(message) => (Status::Usage, json!({"error": "usage", "message": message})),
            CliError::Budget { estimate, budget } => (
                Status::BudgetExceeded,
                json!({
                    "error": "budget_exceeded",
                    "estimate": estimate.to_string(),
                    "budget": budget.to_string(),
                }),
            ),
            CliError::Failure(message) => (Status::AssertionFailed, json!({"error": "failure", "message": message})),
        };
        Outcome {
            output,
            status,
            seeds: Vec::new(),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::BudgetExceeded { estimate, budget } => CliError::Budget { estimate, budget },
            OracleError::ZeroDegree => CliError::Usage(e.to_string()),
            other => CliError::Failure(other.to_string()),
        }
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        CliError::Failure(e.to_string())
    }
}

fn cmd_hurwitz(args: &HurwitzArgs) -> Result<Outcome, CliError> {
    let pattern: MonotonePattern =
        serde_json::from_str(&args.pattern).map_err(|e| CliError::Usage(format!("--pattern: {e}")))?;
    if args.d == 0 {
        return Err(CliError::Usage("--d must be positive".into()));
    }
    let count = match (args.mode, args.connected) {
        (Mode::Oracle, false) => count_monotone_disconnected(args.d, &pattern, Budget::from_env())?,
        (Mode::Oracle, true) => count_monotone_connected(args.d, &pattern, Budget::from_env())?,
        (Mode::Content, false) => disconnected_count_content(args.d, &pattern),
        (Mode::Content, true) => {
            connected_count_content(args.d, &pattern).map_err(|e| CliError::Failure(e.to_string()))?
        }
    };
    Ok(Outcome::success(json!({
        "d": args.d,
        "pattern": pattern,
        "mode": match args.mode {
            Mode::Oracle => "oracle",
            Mode::Content => "content",
        },
        "connected": args.connected,
        "count": count.to_string(),
    })))
}

fn parse_values(text: &str) -> Result<Vec<Rational>, CliError> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_rational(s.trim()).map_err(|e| CliError::Usage(format!("--at: {e}"))))
        .collect()
}

fn cmd_expand(args: &ExpandArgs) -> Result<Outcome, CliError> {
    let (m, n) = (args.m, args.n);
    let output = match args.kind {
        Kind::Moments => cue_moment_series(m, n, args.dmax, args.horder).to_json(),
        Kind::Cumulants => cue_cumulant_series(m, n, args.dmax, args.horder)
            .map_err(|e| CliError::Failure(e.to_string()))?
            .to_json(),
        Kind::Genus => {
            let g = args.g.ok_or_else(|| CliError::Usage("--kind genus needs --g".into()))?;
            if g == 0 {
                return Err(CliError::Usage("--g must be positive".into()));
            }
            let values = match &args.at {
                Some(text) => parse_values(text)?,
                None => vec![Rational::from_integer(1.into()); m + n],
            };
            if values.len() != m + n {
                return Err(CliError::Usage(format!(
                    "--at needs {} values, got {}",
                    m + n,
                    values.len()
                )));
            }
            let layer = genus_generating_function(g, args.connected, args.dmax, m, n)
                .map_err(|e| CliError::Failure(e.to_string()))?;
            let mut series = layer.evaluate_params(&values[..m], &values[m..]);
            if args.phi {
                series = euler_phi(args.dmax).checked_mul(&series)?;
            }
            serde_json::to_value(series.to_json()).expect("plain data serializes")
        }
    };
    Ok(Outcome::success(output))
}

fn cmd_fit(args: &FitArgs) -> Result<Outcome, CliError> {
    let text =
        fs::read_to_string(&args.series).map_err(|e| CliError::Usage(format!("{}: {e}", args.series.display())))?;
    let json: QSeriesJson =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", args.series.display())))?;
    let series = QSeries::from_json(json).map_err(|e| CliError::Usage(e.to_string()))?;
    if args.weight_cap % 2 == 1 {
        return Err(CliError::Usage(format!(
            "--weight-cap must be even, got {}",
            args.weight_cap
        )));
    }
    let dim = basis_dimension(args.weight_cap);
    let outcome = match fit_quasimodular(&series, args.weight_cap, dim, args.validate) {
        Ok(report) => Outcome::success(json!({
            "status": "FIT",
            "weight_cap": report.weight_cap,
            "fit_coefficients": report.fit_coefficients,
            "validated_coefficients": report.validated_coefficients,
            "form": report.form.to_json(),
        })),
        Err(FitError::NotQuasimodularAtCap {
            weight_cap,
            first_mismatch,
        }) => Outcome {
            output: json!({
                "status": "NOT_QUASIMODULAR_AT_CAP",
                "weight_cap": weight_cap,
                "first_mismatch": first_mismatch,
            }),
            status: Status::AssertionFailed,
            seeds: Vec::new(),
        },
        Err(FitError::Underdetermined {
            weight_cap,
            free_variables,
        }) => Outcome {
            output: json!({
                "status": "UNDERDETERMINED",
                "weight_cap": weight_cap,
                "free_variables": free_variables,
            }),
            status: Status::AssertionFailed,
            seeds: Vec::new(),
        },
        Err(e @ (FitError::InsufficientCoefficients { .. } | FitError::OddWeight(_))) => {
            return Err(CliError::Usage(e.to_string()))
        }
        Err(FitError::Algebra(e)) => return Err(e.into()),
    };
    Ok(outcome)
}

fn manifest_path(cli: &Cli) -> Option<PathBuf> {
    cli.manifest.clone().or_else(|| {
        cli.out.as_ref().map(|out| {
            let mut name = out.as_os_str().to_owned();
            name.push(".manifest.json");
            PathBuf::from(name)
        })
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), String> {
    fs::write(path, bytes).map_err(|e| format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let started = Instant::now();
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();

    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(Status::Usage as u8);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(Status::Usage as u8);
        }
    }

    let (name, result) = match &cli.command {
        Command::Hurwitz(args) => ("hurwitz", cmd_hurwitz(args)),
        Command::Expand(args) => ("expand", cmd_expand(args)),
        Command::Fit(args) => ("fit", cmd_fit(args)),
        Command::Verify(args) => ("verify", verify::run(args)),
    };
    let outcome = result.unwrap_or_else(CliError::into_outcome);

    let bytes = serde_json::to_vec(&outcome.output).expect("JSON values serialize");
    let digest = hex::encode(Sha256::digest(&bytes));
    let manifest = json!({
        "command": name,
        "args": argv,
        "seeds": outcome.seeds,
        "versions": {
            "cue-hurwitz": cue_hurwitz::VERSION,
            "cue-hurwitz-cli": env!("CARGO_PKG_VERSION"),
        },
        "threads": rayon::current_num_threads(),
        "wall_time_seconds": started.elapsed().as_secs_f64(),
        "output_sha256": digest,
        "exit_code": outcome.status as u8,
    });
    let manifest_bytes = serde_json::to_vec(&manifest).expect("JSON values serialize");

    let mut written = match &cli.out {
        Some(path) => write_file(path, &[bytes.as_slice(), b"\n"].concat()),
        None => {
            println!("{}", String::from_utf8_lossy(&bytes));
            Ok(())
        }
    };
    if written.is_ok() {
        written = match manifest_path(&cli) {
            Some(path) => write_file(&path, &[manifest_bytes.as_slice(), b"\n"].concat()),
            None => {
                eprintln!("{}", String::from_utf8_lossy(&manifest_bytes));
                Ok(())
            }
        };
    }
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(Status::Usage as u8);
    }
    ExitCode::from(outcome.status as u8)
}
