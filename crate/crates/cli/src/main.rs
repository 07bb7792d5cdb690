mod args;
mod benchmark;
mod commands;
mod config;
mod data;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::error::CliError;

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.common.config {
        Some(path) => config::parse_config_file(path)?,
        None => Default::default(),
    };
    match cli.command {
        Command::Fit(a) => commands::fit(&cli.common, file, a),
        Command::Estimate(a) => commands::estimate(&cli.common, file, a),
        Command::Survival(a) => commands::survival(&cli.common, file, a),
        Command::Sample(a) => commands::sample(&cli.common, file, a),
        Command::Benchmark(a) => benchmark::run(&cli.common, file, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
