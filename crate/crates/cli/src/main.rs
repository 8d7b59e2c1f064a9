//! Command-line front end: spark checks, MIMO identification trials, the
//! instability experiments and support covering.

mod config;
mod context;
mod cover;
mod error;
mod identify;
mod necessity;
mod spark;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::context::Context;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "chanid",
    version,
    about = "Time-frequency channel identification experiments"
)]
struct Cli {
    /// Config file of `key = value` lines with optional `[section]` headers.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for CSV output; nothing is written without it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Number of trials (identifier candidates for `spark`).
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Standard deviation of the additive output noise.
    #[arg(long, global = true)]
    noise: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that every L columns of A(c) are linearly independent.
    Spark(spark::Args),
    /// Simulate and recover a MIMO channel from one pilot transmission.
    Identify(identify::Args),
    /// Instability experiments for overspread supports.
    Necessity(necessity::Args),
    /// Cover rectangle supports by grid cells and pack frequency offsets.
    Cover(cover::Args),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let section = match &cli.command {
        Command::Spark(_) => "spark",
        Command::Identify(_) => "identify",
        Command::Necessity(_) => "necessity",
        Command::Cover(_) => "cover",
    };
    let ctx = Context::new(section, cli.config.as_deref(), cli.seed, cli.out, cli.trials, cli.noise)?;
    match cli.command {
        Command::Spark(a) => spark::run(&ctx, a),
        Command::Identify(a) => identify::run(&ctx, a),
        Command::Necessity(a) => necessity::run(&ctx, a),
        Command::Cover(a) => cover::run(&ctx, a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
