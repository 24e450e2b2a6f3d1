//! Subcommand implementations behind the `spectromap` binary.

pub mod args;
pub mod commands;
pub mod error;

use args::{Cli, Command};
use error::EXIT_OK;

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Fingerprint(a) => commands::fingerprint::run(a).map(|_| EXIT_OK),
        Command::Batch(a) => commands::batch::run(a),
        Command::Aggregate(a) => commands::aggregate::run(a).map(|_| EXIT_OK),
        Command::Render(a) => commands::render::run(a).map(|_| EXIT_OK),
        Command::Synth(a) => commands::synth::run(a).map(|_| EXIT_OK),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error {e}");
            e.code
        }
    }
}
