mod args;
mod commands;
mod config;
mod error;
mod format;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Quote(a) => commands::quote(a),
        Command::Curve(a) => commands::curve(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Verify(a) => commands::verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, error::CliError::VerificationFailed) {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
