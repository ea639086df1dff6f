mod args;
mod commands;
mod error;

use std::process::ExitCode;

use amulab::numkernel::install_tolerances;
use amulab::verify::AcceptanceConfig;
use clap::Parser;

use args::{Cli, Command};
use error::CliError;

fn load_config(cli: &Cli) -> Result<Option<AcceptanceConfig>, CliError> {
    let Some(path) = &cli.config else { return Ok(None) };
    let cfg = AcceptanceConfig::load(path)?;
    if let Some(tol) = cfg.tolerances {
        install_tolerances(tol)?;
    }
    Ok(Some(cfg))
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let config = load_config(&cli)?;
    match &cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Amu(a) => commands::amu(a),
        Command::Index(a) => commands::index(a),
        Command::Transform(a) => commands::transform(a),
        Command::Verify(a) => commands::verify(a, config),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("amulab: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
