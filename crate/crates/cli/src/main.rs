//! `dpgraph`: release edge-private graphs, compute spectra, verify the
//! mechanism exactly on small graphs and run the spectral accuracy sweep.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or validation error,
//! 3 verification failure.

mod args;
mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::{ExperimentFlags, Failure};

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Privatize {
            graph,
            common,
            expect,
        } => commands::privatize(&graph, &common, &expect),
        Command::Spectrum {
            graph,
            common,
            expect,
        } => commands::spectrum(&graph, &common, &expect),
        Command::Experiment {
            config,
            dataset,
            common,
            mechanisms,
            trials,
            summary,
            baseline_sensitivity,
            baseline_lower,
            baseline_upper,
            expect,
        } => commands::experiment(ExperimentFlags {
            config: config.as_deref(),
            dataset,
            common: &common,
            mechanisms: &mechanisms,
            trials,
            summary,
            baseline_sensitivity,
            baseline_lower,
            baseline_upper,
            expect: &expect,
        }),
        Command::Verify {
            nodes,
            common,
            samples,
            allow_seven_nodes,
            flip_bias,
        } => commands::verify(nodes, &common, samples, allow_seven_nodes, flip_bias),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
