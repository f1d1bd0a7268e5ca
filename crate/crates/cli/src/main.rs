//! `wml`: verification suites, single simulations and convergence sweeps.
//!
//! Exit codes: 0 pass, 1 check failed, 2 invalid configuration, 3 I/O or parse failure.

mod commands;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "wml", version, about = "Wave matrix Lindbladization simulator and verifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the identity suites and write a JSON report.
    Verify(VerifyArgs),
    /// Simulate one run and write the final state as JSON.
    Simulate(SimulateArgs),
    /// Sweep step counts, write `n,delta,trial,distance` CSV and a fit JSON.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Lindblad operator (Matrix JSON).
    #[arg(long)]
    pub lindblad: PathBuf,
    /// Initial state (Matrix JSON); on R ⊗ S with `--with-reference`.
    #[arg(long)]
    pub rho: PathBuf,
    /// Hamiltonian (Matrix JSON); requires `--algorithm 2`.
    #[arg(long)]
    pub hamiltonian: Option<PathBuf>,
    /// Replacement for Γ/√d in the dilation operator (vector JSON on d²).
    #[arg(long)]
    pub phi: Option<PathBuf>,
    /// Expected system dimension; checked against the inputs.
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub time: f64,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    #[arg(long, default_value_t = 1)]
    pub algorithm: u8,
    #[arg(long)]
    pub with_reference: bool,
    /// Normalize L and rescale the time instead of rejecting a non-unit norm.
    #[arg(long)]
    pub auto_rescale: bool,
    /// Also report the trace distance to the exact channel.
    #[arg(long)]
    pub compare_exact: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 1.0)]
    pub time: f64,
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000,10000")]
    pub steps_list: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub algorithm: u8,
    #[arg(long)]
    pub with_reference: bool,
    /// Fixed Lindblad operator; a random one per trial when absent.
    #[arg(long)]
    pub lindblad: Option<PathBuf>,
    /// Fixed Hamiltonian for algorithm 2; a random one per trial when absent.
    #[arg(long)]
    pub hamiltonian: Option<PathBuf>,
    #[arg(long)]
    pub phi: Option<PathBuf>,
    #[arg(long)]
    pub auto_rescale: bool,
    /// Hold t²/n at this value across `--times` and report how flat the error is.
    #[arg(long)]
    pub fixed_ratio: Option<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
    pub times: Vec<f64>,
    /// Largest allowed max/min error ratio in `--fixed-ratio` mode.
    #[arg(long, default_value_t = 4.0)]
    pub max_spread: f64,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub expect_slope: f64,
    #[arg(long, default_value_t = 0.15)]
    pub slope_tol: f64,
    /// CSV path; the fit goes next to it with extension `.fit.json`.
    /// Without it the CSV goes to stdout and the fit to stderr.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = commands::configure_threads() {
        return e.report();
    }
    let result = match cli.command {
        Command::Verify(a) => commands::verify(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Sweep(a) => commands::sweep(&a),
    };
    match result {
        Ok(commands::Status::Pass) => ExitCode::SUCCESS,
        Ok(commands::Status::Fail) => ExitCode::from(1),
        Err(e) => e.report(),
    }
}
