//! Command-line front end: configuration, CSV output and command dispatch.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::{parse_config, Cli, Command, RunConfig};
pub use error::CliError;

/// Resolves the configuration and runs the selected command.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = parse_config(cli)?;
    commands::run(&cfg)
}
