use clap::Parser;
use locspec::cli::{error_exit_code, run, Cli, EXIT_CONFIG};
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(n) = std::env::var("LOCSPEC_THREADS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("locspec: LOCSPEC_THREADS must be a positive integer, got {n:?}");
                return ExitCode::from(EXIT_CONFIG);
            }
        }
    }
    let mut stdout = std::io::stdout().lock();
    match run(&cli, &mut stdout) {
        Ok(outcome) => {
            match &outcome {
                locspec::cli::Outcome::Tolerance(msg) | locspec::cli::Outcome::VerifyFailed(msg) => {
                    eprintln!("locspec: {}", msg.lines().next().unwrap_or(""))
                }
                locspec::cli::Outcome::Ok => {}
            }
            ExitCode::from(outcome.exit_code())
        }
        Err(e) => {
            eprintln!("locspec: {e}");
            ExitCode::from(error_exit_code(&e))
        }
    }
}
