//! Command-line front end for `fluidgeom`.
//!
//! Exit codes: 0 on success, 2 on invalid input or usage, 3 on numerical
//! failure. Numerical failures still emit a report carrying the failing
//! residual.

pub mod commands;
pub mod config;
pub mod error;
pub mod fieldfile;
pub mod profile_csv;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::report::Report;

#[derive(Debug, Parser)]
#[command(name = "fluidgeom", version, about = "Curvature diagnostics, shear-flow embeddings and Couette onset")]
pub struct Cli {
    /// TOML config file; falls back to $FLUIDGEOM_CONFIG, then built-in defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// Write field payloads as little-endian f64 instead of CSV.
    #[arg(long, global = true)]
    pub binary: bool,
    /// Include per-node diagnostics in reports.
    #[arg(long, global = true)]
    pub per_node: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Map a continuum state to its curvature operator and test definiteness.
    Rhat(RhatArgs),
    /// Definiteness report for an existing curvature-matrix field.
    Diagnose(DiagnoseArgs),
    /// Quadratic normal-coordinate metric for a curvature value at a point.
    Jet(JetArgs),
    /// Pressure from a periodic velocity field.
    Poisson(PoissonArgs),
    /// Shear-flow embedding into six dimensions with its residuals.
    Embed(EmbedArgs),
    /// Momentum balance versus curvature flux divergence for an analytic metric.
    DynamicsCheck(DynamicsArgs),
    /// Couette transition onset.
    #[command(subcommand)]
    Onset(OnsetCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    #[value(name = "euler-c")]
    EulerC,
    #[value(name = "euler-i")]
    EulerI,
    Ns,
    Neo,
}

#[derive(Debug, Args)]
pub struct RhatArgs {
    /// Field file with components rho, u1, u2, u3.
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// Viscosity for the Navier-Stokes model.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Field file with component p.
    #[arg(long)]
    pub p: Option<PathBuf>,
    /// CSV `rho,p` pressure law for the compressible Euler model.
    #[arg(long)]
    pub law: Option<PathBuf>,
    /// Field file with components F11..F33 for the neo-Hookean model.
    #[arg(long)]
    pub deformation: Option<PathBuf>,
    /// Output field file (manifest path) for the curvature matrix.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    /// Field file with components m11, m22, m33, m12, m13, m23.
    #[arg(long)]
    pub rhat: PathBuf,
}

#[derive(Debug, Args)]
pub struct JetArgs {
    /// R1212,R1313,R2323,R1213,R1223,R1323 at the origin.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    pub rhat_at_point: Vec<f64>,
    /// `N:H`: N nodes per axis (odd) with spacing H, centred on the origin.
    #[arg(long)]
    pub grid: String,
    /// Output field file for the metric.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PoissonArgs {
    /// Field file with components u1, u2, u3 on a periodic grid.
    #[arg(long)]
    pub u: PathBuf,
    /// Output field file for the pressure.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    X2,
    X3,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// Profile CSV with header `x3,u1` (the first column is the profile coordinate).
    #[arg(long)]
    pub profile: PathBuf,
    #[arg(long = "B")]
    pub b: f64,
    #[arg(long, value_enum, default_value = "x3")]
    pub axis: AxisArg,
    /// CSV of s, u1, f, f', H samples.
    #[arg(long)]
    pub samples: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DynamicsArgs {
    /// `euclidean` or `perturbed[:EPS]` (g = I + EPS diag(sin x2 sin x3, 0, 0)).
    #[arg(long)]
    pub metric: String,
    /// Target spacing on the periodic box [0, 2π)³.
    #[arg(long)]
    pub h: f64,
}

#[derive(Debug, Subcommand)]
pub enum OnsetCommand {
    /// Fit the exponential profile through an anchor point.
    Fit {
        /// `x3,u1`.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        anchor: Option<Vec<f64>>,
        #[arg(long)]
        re: Option<f64>,
    },
    /// Sample the critical profile on [-1, 1] as CSV.
    Profile {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        n: usize,
        /// CSV path; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Locate the critical viscosity at every profile sample.
    Scan {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        p0: f64,
        /// `lo,hi`.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        gamma_range: Vec<f64>,
        /// CSV of x3, u1, u1', gamma_crit.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        iterations: Option<usize>,
    },
}

/// What a command produced for the caller to emit.
#[allow(clippy::large_enum_variant)]
pub enum Output {
    Report(Report),
    /// Raw text for standard output (CSV).
    Text(String),
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let echo: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let report_path = cli.report.clone();
    match execute(cli, echo.clone()) {
        Ok(Output::Text(text)) => {
            print!("{text}");
            0
        }
        Ok(Output::Report(r)) => {
            let failed: Vec<String> = r.failed_checks().iter().map(|c| format!("{}.{}", c.op, c.name)).collect();
            if let Err(e) = emit(&r, report_path.as_ref()) {
                eprintln!("error: {e}");
                return e.exit_code();
            }
            if failed.is_empty() {
                0
            } else {
                eprintln!("error: {}", CliError::Check(failed.join(", ")));
                3
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = e.exit_code();
            if code == 3 {
                let r = commands::failure_report(echo, &e);
                if let Err(e2) = emit(&r, report_path.as_ref()) {
                    eprintln!("error: {e2}");
                }
            }
            code
        }
    }
}

fn emit(r: &Report, path: Option<&PathBuf>) -> CliResult<()> {
    let text = r.to_json();
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

fn execute(cli: Cli, echo: Vec<String>) -> CliResult<Output> {
    let (mut config, _) = Config::load(cli.config.as_deref())?;
    if cli.per_node {
        config.output.per_node = true;
    }
    if cli.binary {
        config.output.binary_payload = true;
    }
    match cli.command {
        Command::Rhat(a) => commands::rhat(a, config, echo).map(Output::Report),
        Command::Diagnose(a) => commands::diagnose(a, config, echo).map(Output::Report),
        Command::Jet(a) => commands::jet(a, config, echo).map(Output::Report),
        Command::Poisson(a) => commands::poisson(a, config, echo).map(Output::Report),
        Command::Embed(a) => commands::embed(a, config, echo).map(Output::Report),
        Command::DynamicsCheck(a) => commands::dynamics_check(a, config, echo).map(Output::Report),
        Command::Onset(OnsetCommand::Fit { anchor, re }) => {
            if let Some(a) = anchor {
                let [x3, u1] = a[..] else {
                    return Err(CliError::input("--anchor takes two values: x3,u1"));
                };
                config.onset.anchor = [x3, u1];
            }
            if let Some(re) = re {
                config.onset.reynolds = re;
            }
            commands::onset_fit(config, echo).map(Output::Report)
        }
        Command::Onset(OnsetCommand::Profile { a, n, out }) => commands::onset_profile(a, n, out),
        Command::Onset(OnsetCommand::Scan { profile, p0, gamma_range, out, iterations }) => {
            if let Some(it) = iterations {
                config.onset.bisection_iterations = it;
            }
            let [lo, hi] = gamma_range[..] else {
                return Err(CliError::input("--gamma-range takes two values: lo,hi"));
            };
            commands::onset_scan(&profile, p0, (lo, hi), out, config, echo).map(Output::Report)
        }
    }
}
