mod args;
mod commands;
mod error;
mod output;
mod settings;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;
use crate::error::CliError;
use crate::settings::FileConfig;

fn run(cli: &Cli) -> Result<(), CliError> {
    let file = FileConfig::load(cli.config_file.as_deref())?;
    let params = file.params(&cli.model)?;
    let report = commands::run(&cli.command, params, &file)?;
    let bytes = report.render(cli.format)?;
    match &cli.out {
        Some(path) => std::fs::write(path, bytes).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        }),
        None => {
            let mut stdout = io::stdout().lock();
            match stdout.write_all(&bytes).and_then(|_| stdout.flush()) {
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
                other => other.map_err(CliError::Stdout),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
