use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use quasiherm_cli::{run, Cli, EXIT_FAILURE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap's own usage exit code would collide with the broken-phase code
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_FAILURE as u8),
            };
        }
    };
    let out = run(&cli);
    let _ = std::io::stdout().write_all(&out.stdout);
    eprint!("{}", out.stderr);
    ExitCode::from(out.exit_code as u8)
}
