use std::process::ExitCode;

use clap::Parser;
use torus_mhd::cli::{execute, exit_code, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(&cli);
    match &result {
        Ok(report) => {
            for check in report.checks.iter().filter(|c| !c.passed) {
                eprintln!("check failed: {} ({})", check.name, check.detail);
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(exit_code(&result) as u8)
}
