use std::process::ExitCode;

use clap::Parser;
use rdls::cli::{init_threads, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match init_threads().and_then(|()| run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rdls: {e}");
            ExitCode::FAILURE
        }
    }
}
