//! `atmcmc` experiment harness.
//!
//! Every subcommand reads a flat `key = value` config file, runs one
//! experiment, and writes its outputs plus a `metadata.json` sidecar into
//! `--out`. Exit codes: 0 on success, 1 on configuration/validation errors,
//! 2 on runtime failures.

mod config;
mod experiments;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ExperimentConfig, ExperimentKind};

#[derive(Parser)]
#[command(name = "atmcmc", version, about = "Sampler benchmarks and diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the experiment config file.
    #[arg(long)]
    config: PathBuf,
    /// Directory to write outputs into (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// RNG seed; overrides the `seed` key in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Size of the worker thread pool (default: number of cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single chain and write its trace.
    Sample(CommonArgs),
    /// Acceptance-rate grid over dimensions and proposal scalings.
    BenchTable(CommonArgs),
    /// Ensemble Kolmogorov-Smirnov convergence comparison of both kernels.
    KsExperiment(CommonArgs),
    /// Diffusion-speed and acceptance curves with optimal scalings.
    ScalingCurves(CommonArgs),
    /// One-step geometric drift estimate at a probe point.
    DriftCheck(CommonArgs),
    /// Monte Carlo check of the target's regularity moment conditions.
    MomentsCheck(CommonArgs),
}

impl Command {
    fn kind(&self) -> ExperimentKind {
        match self {
            Command::Sample(_) => ExperimentKind::Sample,
            Command::BenchTable(_) => ExperimentKind::BenchTable,
            Command::KsExperiment(_) => ExperimentKind::KsExperiment,
            Command::ScalingCurves(_) => ExperimentKind::ScalingCurves,
            Command::DriftCheck(_) => ExperimentKind::DriftCheck,
            Command::MomentsCheck(_) => ExperimentKind::MomentsCheck,
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Sample(a)
            | Command::BenchTable(a)
            | Command::KsExperiment(a)
            | Command::ScalingCurves(a)
            | Command::DriftCheck(a)
            | Command::MomentsCheck(a) => a,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let kind = cli.command.kind();
    let args = cli.command.args();

    if let Some(threads) = args.threads {
        if threads == 0 {
            eprintln!("error: field `threads`: must be >= 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: failed to build thread pool: {e}");
            return ExitCode::from(2);
        }
    }

    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read config `{}`: {e}", args.config.display());
            return ExitCode::from(1);
        }
    };

    let cfg = match ExperimentConfig::from_text(kind, &text, args.seed) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };

    match experiments::run_experiment(&cfg, &args.out) {
        Ok(()) => {
            println!("{}: wrote outputs to {}", kind.as_str(), args.out.display());
            ExitCode::SUCCESS
        }
        Err(experiments::RunError::Sampler(e @ atmcmc::Error::InvalidParameter { .. }))
        | Err(experiments::RunError::Sampler(e @ atmcmc::Error::InvalidSpec(_)))
        | Err(experiments::RunError::Sampler(e @ atmcmc::Error::DimensionMismatch { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
