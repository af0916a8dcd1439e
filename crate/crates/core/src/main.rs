use std::process::ExitCode;

use clap::Parser;
use illreg::cli::{apply_thread_limit, run, Cli, EXIT_INPUT};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = apply_thread_limit().and_then(|_| run(cli));
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
