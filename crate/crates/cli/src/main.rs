use std::process::ExitCode;

use clap::Parser;
use dce_cli::{run, thread_cap, Cli, EXIT_CONFIG};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = match thread_cap(std::env::var("DCE_THREADS").ok().as_deref()) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("dce: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match run(&cli, threads) {
        Ok(outcome) => {
            if let Some(s) = outcome.stdout {
                print!("{s}");
            }
            for note in outcome.notes.iter().filter(|n| n.starts_with("warning")) {
                eprintln!("dce: {note}");
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("dce: {:#}", f.error);
            f.exit_code()
        }
    }
}
