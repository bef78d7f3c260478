//! Command-line front end for the cvsim bosonic circuit simulator.
//!
//! Exit codes: 0 success, 2 circuit parse error, 3 resource cap exceeded,
//! 4 backend incompatible with the circuit, 1 anything else.

mod commands;
mod format;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{Backend, CliError};
use cvsim::kerr::KerrKind;
use output::OutputFormat;

/// Environment variable selecting the worker thread count for the
/// parallel reductions (defaults to the number of cores).
const THREADS_ENV: &str = "CVSIM_THREADS";

#[derive(Parser)]
#[command(
    name = "cvsim",
    version,
    about = "Certified simulation of bosonic circuits: bounds, Kerr decompositions, two backends, and Monte-Carlo cutting"
)]
struct Cli {
    /// Output format for reports and records.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    output: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Fock,
    Superpos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    SelfKerr,
    Cross,
}

#[derive(Subcommand)]
enum Command {
    /// Print the circuit envelope, its exponential-energy certificate,
    /// energy bound, and the implied boson-number cutoffs.
    Bounds {
        circuit: PathBuf,
        /// Base for the exponential-energy cutoff; defaults to the
        /// schedule tail t_L and must not exceed it.
        #[arg(long)]
        s: Option<f64>,
        /// Target trace-distance precision for the cutoffs.
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
    /// Print the phase-shifter decomposition of a Kerr gate.
    Decompose {
        /// Rational parameter numerator (with --q).
        #[arg(long)]
        p: Option<i64>,
        /// Rational parameter denominator (with --p).
        #[arg(long)]
        q: Option<u64>,
        /// Real parameter to rationalize by continued fractions.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<f64>,
        /// Largest denominator considered for --x.
        #[arg(long, default_value_t = 1_000_000)]
        qmax: u64,
        #[arg(long, value_enum, default_value_t = KindArg::SelfKerr)]
        kind: KindArg,
    },
    /// Simulate a circuit and print heterodyne probabilities.
    Simulate {
        circuit: PathBuf,
        #[arg(long, value_enum)]
        backend: BackendArg,
        /// Total trace-distance budget; picks the Fock cutoff from the
        /// circuit's exponential-energy certificate.
        #[arg(long)]
        eps: Option<f64>,
        /// Explicit Fock cutoff (overrides --eps).
        #[arg(long)]
        cutoff: Option<u32>,
        /// Budget for replacing irrational Kerr parameters by convergents.
        #[arg(long)]
        rationalize: Option<f64>,
        /// Heterodyne outcomes: points split by ';', mode components by ','.
        #[arg(long, allow_hyphen_values = true)]
        alphas: Option<String>,
        /// Square grid of outcomes min:max:count (single-mode circuits).
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// Cap on superposition term count.
        #[arg(long, default_value_t = 1_000_000)]
        term_cap: usize,
    },
    /// Monte-Carlo estimate of a heterodyne probability by circuit cutting.
    Estimate {
        circuit: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        rationalize: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        alphas: Option<String>,
    },
    /// Run both backends and diff their probabilities.
    Compare {
        circuit: PathBuf,
        #[arg(long, default_value_t = 40)]
        cutoff: u32,
        #[arg(long)]
        rationalize: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        alphas: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[arg(long, default_value_t = 1_000_000)]
        term_cap: usize,
    },
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(value) = std::env::var(THREADS_ENV) {
        let threads: usize = value.parse().map_err(|_| {
            CliError::other(format!("{THREADS_ENV} must be a positive integer, got '{value}'"))
        })?;
        if threads == 0 {
            return Err(CliError::other(format!("{THREADS_ENV} must be at least 1")));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::other(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Bounds { circuit, s, eps } => {
            commands::cmd_bounds(&circuit, s, eps, cli.output)
        }
        Command::Decompose { p, q, x, qmax, kind } => {
            let kind = match kind {
                KindArg::SelfKerr => KerrKind::SelfKerr,
                KindArg::Cross => KerrKind::CrossKerr,
            };
            commands::cmd_decompose(p, q, x, qmax, kind, cli.output)
        }
        Command::Simulate {
            circuit,
            backend,
            eps,
            cutoff,
            rationalize,
            alphas,
            grid,
            term_cap,
        } => commands::cmd_simulate(
            &circuit,
            match backend {
                BackendArg::Fock => Backend::Fock,
                BackendArg::Superpos => Backend::Superpos,
            },
            eps,
            cutoff,
            rationalize,
            &alphas,
            &grid,
            term_cap,
            cli.output,
        ),
        Command::Estimate { circuit, eps, delta, seed, rationalize, alphas } => {
            commands::cmd_estimate(&circuit, eps, delta, seed, rationalize, &alphas, cli.output)
        }
        Command::Compare { circuit, cutoff, rationalize, alphas, grid, term_cap } => {
            commands::cmd_compare(
                &circuit,
                cutoff,
                rationalize,
                &alphas,
                &grid,
                term_cap,
                cli.output,
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
