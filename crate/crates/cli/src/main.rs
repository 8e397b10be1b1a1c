//! `symdiag` command-line tool.
//!
//! Exit codes: 0 success, 1 I/O, parse, usage or numerical failure,
//! 2 a mathematical hypothesis of the requested operation does not hold.

mod commands;
mod matrix_io;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use matrix_io::Format;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("I/O error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Library(#[from] symdiag::Error),
}

#[derive(Debug, Parser)]
#[command(
    name = "symdiag",
    version,
    about = "Williamson decompositions and simultaneous symplectic diagonalization"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Input matrix file; repeat for several matrices. `-` reads standard input.
    #[arg(long, global = true)]
    pub input: Vec<String>,

    /// Input format (default: from the file extension or content); output format for `gen`.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[arg(long, global = true)]
    pub tol_pd: Option<f64>,
    #[arg(long, global = true)]
    pub tol_rank: Option<f64>,
    #[arg(long, global = true)]
    pub tol_commute: Option<f64>,
    #[arg(long, global = true)]
    pub tol_residual: Option<f64>,

    /// Generator seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Number of modes for `gen` (matrices are 2n × 2n).
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Comma-separated symplectic spectrum for `gen`; repeat for a commuting family.
    #[arg(long, global = true, value_parser = parse_spectrum)]
    pub spectrum: Vec<Spectrum>,
    /// Magnitude bound of the random Hamiltonian used by `gen`.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub spread: f64,

    /// Inverse temperature.
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Action quantum.
    #[arg(long = "h", global = true, default_value_t = 1.0)]
    pub planck: f64,
    /// Spatial dimension.
    #[arg(long, global = true)]
    pub d: Option<usize>,
    /// Number of particles (default: number of input matrices).
    #[arg(long = "N", global = true)]
    pub particles: Option<usize>,

    /// Also write the output to this file.
    #[arg(long, global = true)]
    pub out: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum(pub Vec<f64>);

fn parse_spectrum(s: &str) -> Result<Spectrum, String> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| format!("cannot parse {x:?} as a number"))
        })
        .collect::<Result<_, _>>()
        .map(Spectrum)
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Symplectic congruence S with SᵀAS = D ⊗ I₂ for a positive definite A.
    Williamson,
    /// Symplectic eigenvalues of a positive semidefinite matrix.
    SymplecticEigs,
    /// Whether AJB = BJA for two symmetric matrices.
    CheckCommute,
    /// Gram matrix of the Poisson bracket of two quadratic forms.
    Bracket,
    /// Common symplectic congruence of a commuting positive definite family.
    Simdiag,
    /// Simultaneous normal form of a commuting positive semidefinite family.
    NormalForm,
    /// Joint normal modes of two Gaussian covariance matrices.
    GaussianModes,
    /// Classical partition function of a sum of quadratic Hamiltonians.
    Partition,
    /// Seeded random instance in matrix-file format.
    Gen,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match commands::run(&cli) {
        Ok(out) => {
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &out.text) {
                    eprintln!("error: I/O error: {path}: {e}");
                    return ExitCode::from(1);
                }
            }
            println!("{}", out.text.trim_end());
            ExitCode::from(out.exit)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
