//! `jamlim`: command-line front end for jamming-limit simulation.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 armour budget exceeded,
//! 4 degenerate statistics (output is still written).

mod args;
mod commands;
mod report;

use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;

use crate::args::Cli;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] jamlim_core::Error),
    #[error("output: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(jamlim_core::Error::BudgetExceeded { .. }) => 3,
            _ => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            let first = rendered.lines().next().unwrap_or("usage error");
            eprintln!("jamlim: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match execute(&cli) {
        Ok(true) => ExitCode::from(4),
        Ok(false) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("jamlim: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Runs the command; `Ok(true)` flags degenerate statistics.
fn execute(cli: &Cli) -> Result<bool, CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(k) = cli.jobs {
        if k == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        pool = pool.num_threads(k);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let out = pool.install(|| commands::run(&cli.command))?;
    report::emit(&out, cli.csv)?;
    Ok(out.degenerate)
}
