use std::process::ExitCode;

use clap::Parser;
use ptwell_cli::{exit_code, run, Cli, RunConfig, EXIT_INVALID, PRECISION_ENV};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let precision = std::env::var(PRECISION_ENV).ok();
    let config = match RunConfig::from_cli(cli, precision.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e) as u8);
        }
    };
    let text = match run(&config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e) as u8);
        }
    };
    match &config.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_INVALID as u8);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::SUCCESS
}
