//! `hartree`: configuration-driven runs of the mountain-pass solver, the
//! hypothesis checkers, and the numerical verification suite.

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Failure classes with distinct exit codes: 2 validation, 3 geometry,
/// 4 non-convergence, 5 I/O, 1 verification-suite failure.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Geometry(String),
    Unconverged(String),
    Io(String),
    Verification(String),
}

impl CliError {
    fn code(&self) -> (u8, &'static str) {
        match self {
            CliError::Verification(_) => (1, "verification"),
            CliError::Validation(_) => (2, "validation"),
            CliError::Geometry(_) => (3, "geometry"),
            CliError::Unconverged(_) => (4, "non-convergence"),
            CliError::Io(_) => (5, "io"),
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m)
            | CliError::Geometry(m)
            | CliError::Unconverged(m)
            | CliError::Io(m)
            | CliError::Verification(m) => m,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (code, kind) = self.code();
        write!(f, "{kind} error (exit {code}): {}", self.message())
    }
}

impl From<hartree_core::Error> for CliError {
    fn from(e: hartree_core::Error) -> Self {
        use hartree_core::Error as E;
        match e {
            E::GeometryFailure(m) => CliError::Geometry(m),
            E::Unconverged(m) => CliError::Unconverged(m),
            E::Io(err) => CliError::Io(err.to_string()),
            E::FieldFormat(m) => CliError::Io(m),
            other => CliError::Validation(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "hartree",
    about = "Spectral mountain-pass solver for a nonlocal Hartree problem on the unit box",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the positive and negative critical points and write artifacts.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Artifact directory (default: $HARTREE_OUT/run-<confighash>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the numerical verification suite.
    Verify {
        /// Reduced resolution and sample counts.
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 1)]
        dimension: u8,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Check the structural hypotheses and the Ambrosetti-Rabinowitz
    /// condition for the configured reaction term.
    Hypotheses {
        #[arg(long)]
        config: PathBuf,
    },
    /// Export plot-ready CSV tables from a solve artifact directory.
    Export {
        #[arg(long)]
        dir: PathBuf,
    },
    /// Re-run the solve over a list of parameter values.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// One of: lambda, omega, m.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long)]
        values: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve { config, out } => commands::run_solve(&config, out).map(|_| ()),
        Command::Verify {
            quick,
            n,
            dimension,
            seed,
        } => commands::run_verify_cmd(quick, n, dimension, seed),
        Command::Hypotheses { config } => commands::run_hypotheses_cmd(&config),
        Command::Export { dir } => commands::run_export(&dir),
        Command::Sweep {
            config,
            param,
            values,
            out,
        } => commands::run_sweep(&config, &param, &values, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (code, kind) = e.code();
            eprintln!(
                "{}",
                serde_json::json!({
                    "error": { "code": code, "kind": kind, "message": e.message() }
                })
            );
            ExitCode::from(code)
        }
    }
}
