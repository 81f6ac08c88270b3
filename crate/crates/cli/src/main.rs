mod commands;
mod common;
mod config;

use anyhow::Result;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "minkward",
    version,
    about = "Ward-family Minkowski clustering toolkit and benchmark harness"
)]
struct Cli {
    /// Worker threads for seed- and grid-level parallelism (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic benchmark datasets (CSV + JSON sidecar).
    Generate(commands::generate::GenerateArgs),
    /// Run one clustering algorithm over a dataset and export its outputs.
    Cluster(commands::cluster::ClusterArgs),
    /// Run algorithms over many seeds and emit per-seed and aggregate reports.
    Benchmark(commands::benchmark::BenchmarkArgs),
    /// Search the exponent grid and select cells by Silhouette (and ARI).
    Grid(commands::grid::GridArgs),
    /// Score stored partitions/dendrograms against a dataset.
    Evaluate(commands::evaluate::EvaluateArgs),
}

fn main() {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("warning: could not set --jobs: {e}");
        }
    }
    let outcome: Result<()> = match cli.command {
        Command::Generate(args) => commands::generate::run(args),
        Command::Cluster(args) => commands::cluster::run(args),
        Command::Benchmark(args) => commands::benchmark::run(args),
        Command::Grid(args) => commands::grid::run(args),
        Command::Evaluate(args) => commands::evaluate::run(args),
    };
    if let Err(e) = outcome {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
