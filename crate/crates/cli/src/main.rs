use std::process::ExitCode;

use clap::Parser;
use kicktop_cli::{run, RunConfig};

fn main() -> ExitCode {
    let config = RunConfig::parse();
    match run(&config) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("kicktop {}: {e}", config.command.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
