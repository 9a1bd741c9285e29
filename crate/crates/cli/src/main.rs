use std::process::ExitCode;

use clap::Parser;
use contexta_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match cli.json.as_deref() {
        Some("-") => print!("{}", report.to_json()),
        Some(path) => {
            for line in &report.summary {
                println!("{line}");
            }
            if let Err(e) = std::fs::write(path, report.to_json()) {
                eprintln!("error: cannot write {path}: {e}");
                return ExitCode::from(2);
            }
        }
        None => {
            for line in &report.summary {
                println!("{line}");
            }
        }
    }
    ExitCode::SUCCESS
}
