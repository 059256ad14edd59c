//! Library side of the `qfim` command-line tool: configuration, output
//! formatting and the subcommand implementations.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{cmd_curves, cmd_report, cmd_sweep_alpha, cmd_verify, CliError, Outcome};
pub use config::{ConfigError, ErrorCode, RunConfig};
