use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quasiherm_core::krein::DEFAULT_REALITY_TOL;
use quasiherm_core::metric::DEFAULT_CERT_TOL;
use quasiherm_core::Tolerances;

#[derive(Debug, Parser)]
#[command(name = "quasiherm", version, about = "Metric operators and Dyson maps for P-self-adjoint Hamiltonians")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a Hamiltonian and build its certified metric.
    Analyze(AnalyzeArgs),
    /// Propagate a state and tabulate norms and expectation values.
    Evolve(EvolveArgs),
    /// Tabulate the phase diagram of a model family.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ToleranceArgs {
    /// Relative eigen-residual bound (default 1e-10 times the dimension).
    #[arg(long)]
    pub tol_eig: Option<f64>,
    /// Relative threshold on |Im E| for a mode to count as real.
    #[arg(long, default_value_t = DEFAULT_REALITY_TOL)]
    pub tol_reality: f64,
    /// Quasi-Hermiticity certification threshold.
    #[arg(long, default_value_t = DEFAULT_CERT_TOL)]
    pub tol_cert: f64,
}

impl ToleranceArgs {
    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            eig: self.tol_eig,
            reality: self.tol_reality,
            cert: self.tol_cert,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OperatorInputs {
    /// Hamiltonian operator file (JSON).
    pub hamiltonian: PathBuf,
    /// Pseudometric: an operator file, or `exchange` / `identity`.
    #[arg(long, short = 'p', default_value = "exchange")]
    pub pseudometric: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub inputs: OperatorInputs,
    #[command(flatten)]
    pub tol: ToleranceArgs,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub format: ReportFormat,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Picture {
    Schrodinger,
    Heisenberg,
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub inputs: OperatorInputs,
    /// Initial state file (JSON); normalized to unit metric norm.
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long)]
    pub t_max: f64,
    /// Number of time steps; the grid has `steps + 1` nodes.
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = Picture::Schrodinger)]
    pub picture: Picture,
    /// Observable operator file; repeat to track several.
    #[arg(long)]
    pub observable: Vec<PathBuf>,
    /// Evolve a broken-phase Hamiltonian with the flat metric.
    #[arg(long)]
    pub force: bool,
    #[command(flatten)]
    pub tol: ToleranceArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Pt2,
    Chain,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Gain/loss strength of the two-level cell, `START:STOP:STEP` or a value.
    #[arg(long)]
    pub a: Option<String>,
    /// Coupling of the two-level cell.
    #[arg(long)]
    pub b: Option<String>,
    /// Chain length.
    #[arg(long)]
    pub n: Option<String>,
    /// Chain edge gain/loss.
    #[arg(long)]
    pub gamma: Option<String>,
    /// Chain hopping.
    #[arg(long, default_value = "1")]
    pub coupling: String,
    #[command(flatten)]
    pub tol: ToleranceArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
