//! Batch front-end: build topologies, run placements and deliveries, verify
//! decodability, and emit bound curves and ensemble reports as CSV/JSON.

mod bounds;
mod common;
mod ensemble;
mod simulate;
mod verify;

use clap::{Parser, Subcommand};

use common::Failure;

#[derive(Parser)]
#[command(name = "macc-lab", version, about = "Multi-access coded caching simulator and bound calculator", long_about = None)]
struct Cli {
    /// Worker threads for permutation and ensemble scans
    /// (default: all cores; env: MACC_LAB_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Refuse to enumerate ensembles larger than this.
    #[arg(long, global = true, default_value_t = macc_core::converse::DEFAULT_ENUMERATION_CAP)]
    max_enumeration: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Place, deliver, decode and verify one combinatorial instance.
    Simulate(simulate::SimulateArgs),
    /// Emit a memory/load tradeoff curve as CSV and/or JSON.
    Bounds(bounds::BoundsArgs),
    /// Enumerate a connectivity ensemble and cross-check its bounds.
    Ensemble(ensemble::EnsembleArgs),
    /// Run the full self-verification suite.
    Verify(verify::VerifyArgs),
}

fn main() {
    let cli = Cli::parse();

    let threads = cli.threads.or_else(|| {
        std::env::var("MACC_LAB_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    });
    if let Some(n) = threads {
        // Ignore failure: the global pool can only be set once.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }

    let result = match cli.command {
        Command::Simulate(args) => simulate::run(args),
        Command::Bounds(args) => bounds::run(args),
        Command::Ensemble(args) => ensemble::run(args, cli.max_enumeration),
        Command::Verify(args) => verify::run(args),
    };

    match result {
        Ok(()) => {}
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("invariant violation: {msg}");
            std::process::exit(3);
        }
    }
}
