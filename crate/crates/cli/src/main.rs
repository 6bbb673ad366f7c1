//! `qgraph`: command-line access to the circulant-coupling quantum-graph
//! machinery — symmetry reports, scattering matrices, bound states, lattice
//! band structure, Fermi contours, spectral fractions and gap closings.
//!
//! Exit codes: 0 success, 2 invalid parameters, 3 numerical failure (for
//! example a Fermi contour requested in a spectral gap).

use std::f64::consts::PI;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod coupling;
mod output;
mod svg;

use coupling::CouplingArgs;
use output::{emit, render, Format};

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical(String),
}

impl CliError {
    fn from_library(e: qgraph::Error) -> Self {
        use qgraph::Error::*;
        match e {
            MomentumInGap { .. } | SingularMatrix { .. } | EtaPole => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output format: csv | json
    #[arg(long, default_value = "csv")]
    format: String,

    /// Output path, or "-" for stdout
    #[arg(long, default_value = "-")]
    output: String,

    /// Also write an SVG plot here (bands and fermi only)
    #[arg(long)]
    svg: Option<String>,
}

impl OutputArgs {
    fn format(&self) -> Result<Format, CliError> {
        match self.format.as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::Validation(format!(
                "unknown format {other:?}; expected csv | json"
            ))),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "qgraph",
    version,
    about = "Quantum-graph spectra with circulant vertex couplings"
)]
struct Cli {
    /// Worker threads for parameter sweeps (default: all cores); affects
    /// runtime only, never output bytes
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transposition symmetry and mirror covariance of a coupling
    Symmetry {
        #[command(flatten)]
        coupling: CouplingArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// On-shell scattering matrix at one momentum
    Smatrix {
        #[command(flatten)]
        coupling: CouplingArgs,
        /// Length scale of the vertex condition
        #[arg(long)]
        ell: f64,
        /// Momentum
        #[arg(long)]
        k: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Bound and antibound states of a circulant coupling
    BoundStates {
        #[command(flatten)]
        coupling: CouplingArgs,
        #[arg(long)]
        ell: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Spectral bands of the square lattice; add --mu-grid for a phase sweep
    Bands {
        /// Coupling phase (required unless sweeping with --mu-grid)
        #[arg(long)]
        mu: Option<f64>,
        /// Lattice edge length
        #[arg(long)]
        ell: f64,
        #[arg(long, default_value_t = 1e-3)]
        k_min: f64,
        #[arg(long)]
        k_max: f64,
        /// positive | negative | both
        #[arg(long, default_value = "both")]
        branch: String,
        #[arg(long, default_value_t = 400)]
        grid: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Number of phase steps for a sweep over [--mu-min, --mu-max]
        #[arg(long)]
        mu_grid: Option<usize>,
        #[arg(long, default_value_t = 0.0)]
        mu_min: f64,
        #[arg(long, default_value_t = PI / 2.0)]
        mu_max: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Fermi contour at an in-band momentum
    Fermi {
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        ell: f64,
        #[arg(long)]
        k: f64,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Fraction of the energy window covered by spectrum
    Psigma {
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        ell: f64,
        #[arg(long)]
        k_max: f64,
        #[arg(long, default_value_t = 1000)]
        grid: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Gap-closing (Dirac) points in a phase window
    Dirac {
        #[arg(long)]
        ell: f64,
        #[arg(long)]
        mu_min: f64,
        #[arg(long)]
        mu_max: f64,
        #[arg(long)]
        k_min: f64,
        #[arg(long)]
        k_max: f64,
        #[arg(long, default_value_t = 40)]
        grid: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn write_result(
    name: &str,
    out: &OutputArgs,
    table: output::Table,
    params: serde_json::Value,
    plot: Option<String>,
) -> Result<(), CliError> {
    let text = render(name, params, &table, out.format()?);
    emit(&out.output, &text)
        .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", out.output)))?;
    if let Some(path) = &out.svg {
        match plot {
            Some(content) => emit(path, &content)
                .map_err(|e| CliError::Validation(format!("cannot write {path}: {e}")))?,
            None => {
                return Err(CliError::Validation(format!(
                    "--svg is not supported for {name}"
                )))
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Validation("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Validation(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Symmetry { coupling, out } => {
            let (table, params) = commands::symmetry(&coupling)?;
            write_result("symmetry", &out, table, params, None)
        }
        Command::Smatrix {
            coupling,
            ell,
            k,
            out,
        } => {
            let (table, params) = commands::smatrix(&coupling, ell, k)?;
            write_result("smatrix", &out, table, params, None)
        }
        Command::BoundStates { coupling, ell, out } => {
            let (table, params) = commands::bound_states_cmd(&coupling, ell)?;
            write_result("bound-states", &out, table, params, None)
        }
        Command::Bands {
            mu,
            ell,
            k_min,
            k_max,
            branch,
            grid,
            tol,
            mu_grid,
            mu_min,
            mu_max,
            out,
        } => {
            let cfg = commands::BandsConfig {
                mu,
                ell,
                k_min,
                k_max,
                branch,
                grid,
                tol,
                mu_grid,
                mu_min,
                mu_max,
            };
            let (table, params, plot) = commands::bands(&cfg)?;
            write_result("bands", &out, table, params, plot)
        }
        Command::Fermi {
            mu,
            ell,
            k,
            grid,
            out,
        } => {
            let (table, params, plot) = commands::fermi(mu, ell, k, grid)?;
            write_result("fermi", &out, table, params, plot)
        }
        Command::Psigma {
            mu,
            ell,
            k_max,
            grid,
            out,
        } => {
            let (table, params) = commands::psigma(mu, ell, k_max, grid)?;
            write_result("psigma", &out, table, params, None)
        }
        Command::Dirac {
            ell,
            mu_min,
            mu_max,
            k_min,
            k_max,
            grid,
            out,
        } => {
            let (table, params) = commands::dirac(ell, mu_min, mu_max, k_min, k_max, grid)?;
            write_result("dirac", &out, table, params, None)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
