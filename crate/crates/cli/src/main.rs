use std::process::ExitCode;

use clap::Parser;
use sidelobe_cli::{run, Cli, SEED_ENV};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed_env = std::env::var(SEED_ENV).ok();
    match run(cli, seed_env.as_deref()) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
