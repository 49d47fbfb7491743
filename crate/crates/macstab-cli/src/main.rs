//! Command-line front end: codeword lengths, rate-region geometry, policy
//! synthesis, seeded simulation, and capacity-region verification, all
//! driven by one JSON experiment configuration.

mod commands;
mod config;
mod csvout;
mod error;
mod record;

use clap::{Parser, Subcommand};

use crate::error::CliError;

#[derive(Parser)]
#[command(
    name = "macstab",
    version,
    about = "Experiments for scheduled multi-access coding and queue stability"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Codeword lengths with bounds and error-bound values per schedule.
    Nlen(commands::nlen::NlenArgs),
    /// Catalog rates plus boundary radii of both rate regions, as CSV.
    Regions(commands::regions::RegionsArgs),
    /// Report or synthesize a schedule distribution with its splitting rule.
    Policy(commands::policy::PolicyArgs),
    /// Run the slotted queueing chain and classify its stability.
    Simulate(commands::simulate::SimulateArgs),
    /// Sample-based check of both capacity-region inclusions.
    Capcheck(commands::capcheck::CapcheckArgs),
}

fn main() {
    let cli = Cli::parse();
    let result: Result<(), CliError> = match &cli.command {
        Command::Nlen(args) => commands::nlen::run(args),
        Command::Regions(args) => commands::regions::run(args),
        Command::Policy(args) => commands::policy::run(args),
        Command::Simulate(args) => commands::simulate::run(args),
        Command::Capcheck(args) => commands::capcheck::run(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
