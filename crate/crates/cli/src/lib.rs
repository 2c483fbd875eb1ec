//! Library side of the `affect` command: argument parsing, validation and
//! the subcommand implementations.

mod commands;
mod config;
mod error;
mod output;

use std::ffi::OsString;

use clap::Parser;

pub use crate::config::{Cli, Command, RunConfig, DATA_DIR_ENV};
pub use crate::error::CliError;

/// Parses `args` (program name first), runs the command and returns the
/// process exit status. Failures are reported on standard error as one JSON
/// line.
pub fn run_cli<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let msg = e.render().to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            let first = first.strip_prefix("error: ").unwrap_or(first);
            return fail(&CliError::Validation(first.to_string()));
        }
    };
    match RunConfig::validate(cli.command).and_then(|config| commands::run(&config)) {
        Ok(()) => 0,
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> u8 {
    eprintln!("{}", e.diagnostic());
    e.exit_code()
}
