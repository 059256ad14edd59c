use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qfim_cli::commands::{CliError, Outcome, EXIT_INVALID};
use qfim_cli::{cmd_curves, cmd_report, cmd_sweep_alpha, cmd_verify, RunConfig};

/// Quantum Fisher information for sequential SU(2) schemes.
#[derive(Debug, Parser)]
#[command(name = "qfim", version)]
struct Cli {
    /// Flat JSON run configuration; omitted fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides `seed` from the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides `samples` from the configuration.
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// QFIM, maxima, residuals, precision bounds and attainability as JSON.
    Report,
    /// Control gain against the effectiveness angle, as CSV.
    SweepAlpha,
    /// Magnetometry precision against the number of segments, as CSV.
    Curves,
    /// Randomized oracle cross-checks; exit 1 when any suite fails.
    Verify,
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(samples) = cli.samples {
        cfg.samples = samples;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = load(cli)?;
    let outcome = match cli.command {
        Command::Report => cmd_report(&cfg)?,
        Command::SweepAlpha => cmd_sweep_alpha(&cfg)?,
        Command::Curves => cmd_curves(&cfg)?,
        Command::Verify => cmd_verify(&cfg)?,
    };
    match &cli.out {
        Some(path) => {
            std::fs::write(path, &outcome.text).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            if matches!(cli.command, Command::Verify) {
                print!("{}", outcome.text);
            }
        }
        None => print!("{}", outcome.text),
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => ExitCode::from(outcome.exit_code as u8),
        Err(e) => {
            eprintln!("qfim: {e}");
            ExitCode::from(EXIT_INVALID as u8)
        }
    }
}
