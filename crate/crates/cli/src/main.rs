use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use rectifiability_cli::{run, Cli, CliError};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!(
                "{}",
                CliError::new("usage_error", e.to_string().trim_end()).to_json()
            );
            return ExitCode::from(2);
        }
    };
    ExitCode::from(run(&cli) as u8)
}
