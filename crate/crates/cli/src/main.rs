//! Command-line pipeline for diversity-based test prioritisation: extract
//! test cases from class files or text corpora, build distance matrices,
//! reorder suites, score orderings, and benchmark the representations.

mod bench;
mod commands;
mod config;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{RawArgs, RunConfig};

#[derive(Parser)]
#[command(
    name = "tcpdiv",
    version,
    about = "Diversity-based regression test prioritisation",
    after_help = "Any flag may also come from a `key = value` configuration \
                  file passed with --config; command-line flags win."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Read test cases and write encoded corpus files into --out.
    Extract(RawArgs),
    /// Build the pairwise edit-distance matrix of a corpus.
    Matrix(RawArgs),
    /// Reorder a test suite with the algorithm named by --algo.
    Prioritize(RawArgs),
    /// Score an order file against a kill map and/or fault map.
    Evaluate(RawArgs),
    /// Time matrix construction on a seeded synthetic corpus.
    Bench(RawArgs),
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let raw = match &cli.command {
        Command::Extract(raw)
        | Command::Matrix(raw)
        | Command::Prioritize(raw)
        | Command::Evaluate(raw)
        | Command::Bench(raw) => raw.clone(),
    };
    let config = RunConfig::resolve(raw)?;
    if let Some(threads) = config.threads {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    match cli.command {
        Command::Extract(_) => commands::extract(&config),
        Command::Matrix(_) => commands::matrix(&config),
        Command::Prioritize(_) => commands::prioritize(&config),
        Command::Evaluate(_) => commands::evaluate(&config),
        Command::Bench(_) => commands::bench(&config),
    }
}
