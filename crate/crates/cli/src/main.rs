//! `gridcert`: stability and resiliency certificates from the command line.
//!
//! Exit codes: 0 certified or success, 1 not certified or inconclusive,
//! 2 input or numerical error.

// `!(x >= 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod input;
mod report;
#[cfg(test)]
mod tests;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Environment variable naming a JSON file of solver settings.
pub const SETTINGS_ENV: &str = "GRIDCERT_SOLVER_SETTINGS";

#[derive(Debug, Parser)]
#[command(name = "gridcert", version, about = "Lyapunov certificates for power grid transient stability")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Built-in network (2bus, 3gen, case118) or a path to a `.net` or MATPOWER `.m` file.
    #[arg(long, global = true, default_value = "2bus")]
    pub net: String,
    /// Redraw inertia on [2, 4] and damping on [1, 2] with this seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Angle bound, e.g. `pi/6` or `0.5`.
    #[arg(long, global = true, default_value = "pi/6")]
    pub gamma: String,
    /// JSON report destination (default: stdout).
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// Solver settings JSON; overrides the environment variable.
    #[arg(long, global = true)]
    pub settings: Option<PathBuf>,
    /// Include wall-clock timings in the report (not reproducible).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Solve the power-flow equations for the equilibrium angles.
    SolveEq,
    /// Evaluate the synchronization condition against `sin(gamma)`.
    CheckSync(CheckSyncArgs),
    /// Build a certificate and check a state or clearing time.
    Certify {
        #[command(subcommand)]
        kind: CertifyCmd,
    },
    /// Check a contingency list (`u-v tau` per line) against one cached certificate.
    Screen(ScreenArgs),
    /// Integrate the fault-on and post-fault dynamics and print CSV.
    Simulate(SimulateArgs),
    /// Certify, then replay the scenario in simulation.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct CheckSyncArgs {
    /// Remove this line (`u-v`) before the test.
    #[arg(long)]
    pub trip: Option<String>,
    /// Use the unweighted graph Laplacian.
    #[arg(long)]
    pub unweighted: bool,
}

#[derive(Debug, Subcommand)]
pub enum CertifyCmd {
    /// Region-of-attraction check of a state around the equilibrium.
    Stability(StateArgs),
    /// Check of a state against every equilibrium with edge angles within gamma.
    Robust(StateArgs),
    /// Clearing-time check for a line fault.
    Resiliency(ResiliencyArgs),
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// Comma-separated absolute state (angles, velocities) or angles only.
    #[arg(long, allow_hyphen_values = true)]
    pub state: String,
}

#[derive(Debug, Args, Clone)]
pub struct MuArgs {
    #[arg(long, conflicts_with = "mu_search")]
    pub mu: Option<f64>,
    /// Search `mu` for the largest clearing-time bound.
    #[arg(long)]
    pub mu_search: bool,
}

#[derive(Debug, Args, Clone)]
pub struct TargetArgs {
    /// Tripped line as `u-v` (bus ids).
    #[arg(long, conflicts_with = "all_lines")]
    pub line: Option<String>,
    /// Cover every single-line trip.
    #[arg(long)]
    pub all_lines: bool,
}

#[derive(Debug, Args)]
pub struct ResiliencyArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    #[command(flatten)]
    pub mu: MuArgs,
    /// Clearing time to check.
    #[arg(long)]
    pub tau: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ScreenArgs {
    /// Contingency list; `-` reads stdin.
    #[arg(long)]
    pub contingencies: PathBuf,
    #[command(flatten)]
    pub mu: MuArgs,
    /// Reuse a saved all-lines certificate instead of solving.
    #[arg(long)]
    pub certificate: Option<PathBuf>,
    /// Save the certificate used.
    #[arg(long)]
    pub save_certificate: Option<PathBuf>,
    /// Worker threads (default: number of cores).
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Line to trip, `u-v`.
    #[arg(long)]
    pub fault: Option<String>,
    #[arg(long, default_value_t = 0.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 10.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = gridcert_core::sim::DEFAULT_STEP)]
    pub step: f64,
    /// Initial absolute state for a run without a fault.
    #[arg(long, allow_hyphen_values = true)]
    pub state: Option<String>,
    /// Keep every n-th step in the CSV.
    #[arg(long, default_value_t = 1)]
    pub every: usize,
    /// CSV destination (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    #[command(flatten)]
    pub mu: MuArgs,
    /// Clearing time (resiliency mode).
    #[arg(long)]
    pub tau: Option<f64>,
    /// Initial state (stability or robust mode).
    #[arg(long, allow_hyphen_values = true)]
    pub state: Option<String>,
    /// With `--state`, replay against every vertex of the equilibrium set.
    #[arg(long)]
    pub robust: bool,
    #[arg(long, default_value_t = 50.0)]
    pub horizon: f64,
    /// Convergence tolerance.
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match commands::run(&cli.global, &cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    ExitCode::from(code as u8)
}
