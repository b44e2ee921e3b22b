mod args;
mod error;
mod exponents;
mod output;
mod sim;
mod spectrum;
mod verify;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::error::{usage, CliError, CliResult};

fn configure_threads(threads: Option<usize>) -> CliResult<()> {
    match threads {
        None => Ok(()),
        Some(0) => Err(usage("--threads must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}"))),
    }
}

/// Runs the command; `Ok(false)` means a verification failed.
fn run(cli: &Cli, argv: &[String]) -> CliResult<bool> {
    let started = Instant::now();
    configure_threads(cli.global.threads)?;
    let seed = cli.global.seed;
    let (report, passed) = match &cli.command {
        Command::Exponents(args) => (exponents::run(args)?, true),
        Command::Spectra(args) => (spectrum::run(args)?, true),
        Command::Sim(args) => (sim::run(args, seed)?, true),
        Command::Verify(args) => verify::run(args, seed),
    };
    output::emit(&report, &cli.global, argv, started)?;
    Ok(passed)
}

fn report_error(error: &CliError) -> ExitCode {
    eprintln!("{}", error.to_json());
    ExitCode::from(error.exit_code())
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report_error(&CliError::Usage(e.render().to_string().trim_end().to_string())),
    };
    match run(&cli, &argv) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(error) => report_error(&error),
    }
}
