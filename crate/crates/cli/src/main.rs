//! `plsstop` command-line driver.

mod args;
mod commands;
mod config;
mod error;
mod io;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliError;

fn run() -> Result<(), CliError> {
    let argv = config::expand(std::env::args_os().collect())?;
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match &cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Select(a) => commands::select(a),
        Command::Compare(a) => commands::compare(a),
        Command::Robustness(a) => commands::robustness(a),
        Command::PartitionCount(a) => commands::partition(a),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
