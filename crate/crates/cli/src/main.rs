use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cqad_cli::config::RunConfig;
use cqad_cli::{commands, CliError};

/// Simulation and fitting front end for a multimode acoustic cavity coupled
/// to a flux-tunable transmon.
#[derive(Parser)]
#[command(name = "cqad", version, about)]
struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; created when missing.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads for sweeps and fit evaluations (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for synthetic-noise generation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bare cavity reflection: CSV + SVG.
    BareSpectrum,
    /// 2-D reflection map over coil current: long CSV + heatmap SVG.
    FluxSweep,
    /// Participation of the tracked eigenbranch versus flux: CSV.
    Participation,
    /// Dispersive shift versus qubit frequency: CSV.
    Dispersive,
    /// Stark-shift curves versus phonon number: CSV.
    Stark,
    /// Phonon emission rate and qubit linewidth versus frequency: CSV.
    Emission,
    /// Fit parameters to a CSV in one of the emitted schemas: JSON.
    Fit {
        /// Input data; overrides task.fit.data.
        data: Option<PathBuf>,
    },
}

fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::config(format!("thread pool: {e}")))?;
    }
    let config_path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::config("--config PATH is required".into()))?;
    let config = RunConfig::load(config_path)?;
    std::fs::create_dir_all(&cli.out)?;

    match &cli.command {
        Command::BareSpectrum => commands::bare_spectrum(&config, &cli.out, cli.seed),
        Command::FluxSweep => commands::flux_sweep(&config, &cli.out, cli.seed),
        Command::Participation => commands::participation(&config, &cli.out),
        Command::Dispersive => commands::dispersive(&config, &cli.out),
        Command::Stark => commands::stark(&config, &cli.out),
        Command::Emission => commands::emission(&config, &cli.out),
        Command::Fit { data } => commands::fit(&config, &cli.out, data.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(files) => {
            for file in files {
                println!("{}", file.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
