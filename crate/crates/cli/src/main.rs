//! Experiment driver for the `aoi-power` library: closed-form evaluation,
//! Monte Carlo validation, policy optimization, and power sweeps, with
//! reproducible seeded runs and CSV/JSON figure-data export.

mod commands;
mod output;
mod spec;

use anyhow::Result;
use clap::{Parser, Subcommand};
use spec::CommonArgs;

#[derive(Parser)]
#[command(
    name = "aoi-power",
    version,
    about = "Average age-of-information analysis and power control for slotted status updates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form average age and average power of a policy
    Evaluate(CommonArgs),
    /// Slot-level Monte Carlo validation of a policy
    Simulate(CommonArgs),
    /// Exhaustive on-off policy search under the power budget
    OptimizeOnoff(CommonArgs),
    /// Simulated-annealing policy search seeded from the on-off optimum
    OptimizeSa(CommonArgs),
    /// Constant / on-off / annealed age columns across a power grid
    Sweep(CommonArgs),
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Evaluate(args) => commands::evaluate(&args.resolve("evaluate")?),
        Command::Simulate(args) => commands::run_simulation(&args.resolve("simulate")?),
        Command::OptimizeOnoff(args) => {
            commands::optimize_onoff_cmd(&args.resolve("optimize-onoff")?)
        }
        Command::OptimizeSa(args) => commands::optimize_sa(&args.resolve("optimize-sa")?),
        Command::Sweep(args) => commands::sweep(&args.resolve("sweep")?),
    }
}
