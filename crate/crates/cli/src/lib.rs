//! Library side of the `quasiherm` command: argument types, file formats and
//! the three subcommands. Each command returns a [`CommandOutput`] so it can
//! be driven from tests without spawning a process.

use std::path::Path;

pub mod analyze;
pub mod args;
mod error;
pub mod evolve;
pub mod io;
pub mod sweep;

pub use analyze::{cmd_analyze, RunReport};
pub use args::{Cli, Command};
pub use error::CliError;
pub use evolve::cmd_evolve;
pub use sweep::cmd_sweep;

/// Unbroken spectrum with every certificate passing.
pub const EXIT_CERTIFIED: i32 = 0;
/// Any failure: parse errors, failed certificates, overflow.
pub const EXIT_FAILURE: i32 = 1;
/// Valid input in the broken phase.
pub const EXIT_BROKEN: i32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub exit_code: i32,
    /// Report or table destined for standard output (empty when written to
    /// `--out`).
    pub stdout: Vec<u8>,
    pub stderr: String,
}

impl CommandOutput {
    pub fn failure(e: &CliError) -> Self {
        Self {
            exit_code: EXIT_FAILURE,
            stdout: Vec::new(),
            stderr: format!("error: {}: {e}\n", e.qualified_name()),
        }
    }
}

/// Sends `body` to `out` atomically, or returns it as standard output.
pub(crate) fn emit(body: Vec<u8>, out: Option<&Path>, code: i32) -> CommandOutput {
    match out {
        None => CommandOutput {
            exit_code: code,
            stdout: body,
            stderr: String::new(),
        },
        Some(path) => match io::write_atomic(path, &body) {
            Ok(()) => CommandOutput {
                exit_code: code,
                stdout: Vec::new(),
                stderr: String::new(),
            },
            Err(e) => CommandOutput::failure(&e),
        },
    }
}

pub fn run(cli: &Cli) -> CommandOutput {
    match &cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Evolve(a) => cmd_evolve(a),
        Command::Sweep(a) => cmd_sweep(a),
    }
}
