use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

mod commands;
mod config;

use config::{Overrides, RunConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    /// Per-trace statistics, KPSS and decomposition.
    Analyze,
    /// Compare naive, SARIMA and LSTM forecasts on every trace.
    Bench,
    /// SARIMA order search and LSTM hyperparameter sweep.
    Tune,
    /// Write the synthetic trace suite.
    Synth,
    /// Fit and save models on whole traces.
    Fit,
    /// Forecast past each trace with saved models.
    Forecast,
}

/// Forecast CPU utilization traces with SARIMA and LSTM models.
#[derive(Debug, Parser)]
#[command(name = "loadcast", version)]
struct Cli {
    command: Command,
    /// Run configuration (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    jobs: Option<usize>,
    /// Overrides the config seed and LOADCAST_SEED.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> loadcast::Result<()> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| loadcast::Error::InvalidConfig(e.to_string()))?;
    }
    let overrides = Overrides {
        seed: cli.seed,
        out: cli.out,
        env_seed: std::env::var("LOADCAST_SEED").ok(),
    };
    let config = RunConfig::load(&cli.config, &overrides)?;
    match cli.command {
        Command::Analyze => commands::analyze(&config),
        Command::Bench => commands::bench(&config),
        Command::Tune => commands::tune(&config),
        Command::Synth => commands::synth(&config),
        Command::Fit => commands::fit_models(&config),
        Command::Forecast => commands::forecast_traces(&config),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
