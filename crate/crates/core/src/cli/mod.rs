//! Command-line surface: `torus-mhd <subcommand> --config <path> [--out <dir>] [--seed <u64>]`.

mod config;
mod experiments;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{BackgroundSpec, ExperimentConfig, ExperimentKind};
pub use experiments::{
    check_diophantine, exit_code, initial_state, linear_decay, linear_decay_data, log_times,
    nonlinear_run, run_experiment, solver_config, verify_kernels, Check, DiophantineOutcome,
    KernelSuite, LinearDecayOutcome, NonlinearOutcome, Report,
};

use crate::error::Error;

#[derive(Debug, Parser)]
#[command(name = "torus-mhd", version, about = "Spectral laboratory for perturbed MHD on the torus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct RunArgs {
    /// Experiment configuration (flat key = value file).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides the `out` key.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Random seed; overrides the `seed` key.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify the Diophantine constant of the background field.
    CheckDiophantine(RunArgs),
    /// Tabulate frequency regions and characteristic roots.
    ClassifySpectrum(RunArgs),
    /// Check the kernel bounds on a frequency box.
    VerifyKernels(RunArgs),
    /// Track Sobolev norms of the exact linear solution and fit decay rates.
    LinearDecay(RunArgs),
    /// Integrate the nonlinear system and monitor stability diagnostics.
    NonlinearRun(RunArgs),
}

impl Command {
    fn parts(&self) -> (ExperimentKind, &RunArgs) {
        match self {
            Command::CheckDiophantine(a) => (ExperimentKind::CheckDiophantine, a),
            Command::ClassifySpectrum(a) => (ExperimentKind::ClassifySpectrum, a),
            Command::VerifyKernels(a) => (ExperimentKind::VerifyKernels, a),
            Command::LinearDecay(a) => (ExperimentKind::LinearDecay, a),
            Command::NonlinearRun(a) => (ExperimentKind::NonlinearRun, a),
        }
    }
}

/// Loads the config, applies command-line overrides and runs it.
pub fn execute(cli: &Cli) -> crate::Result<Report> {
    let (kind, args) = cli.command.parts();
    let mut cfg = ExperimentConfig::from_path(&args.config)?;
    if cfg.kind != kind {
        return Err(Error::config(format!(
            "kind: config describes {} but the subcommand is {}",
            cfg.kind.name(),
            kind.name()
        )));
    }
    if let Some(out) = &args.out {
        cfg.out = out.clone();
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    run_experiment(&cfg)
}
