//! `kneecast` — knee-onset prediction experiments from the command line.
//!
//! Subcommands: convert, synth, label, train, evaluate, attention,
//! reduce, benchmark. Failures print machine-readable JSON on stderr and
//! exit nonzero.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "kneecast",
    version,
    about = "Battery knee-onset prediction toolkit"
)]
struct Cli {
    /// Flat JSON config file; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Base seed (splits, initialization, generation).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker cap for parallel runs.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// off, error, warn, info, debug, trace.
    #[arg(long, global = true, default_value = "warn")]
    log_level: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a public-dataset per-cell CSV dump into cells-csv.
    Convert(commands::ConvertArgs),
    /// Generate a synthetic corpus.
    Synth(commands::SynthArgs),
    /// Fit knee-onset labels for every cell.
    Label(commands::LabelArgs),
    /// Train one architecture (optionally a hyperparameter grid).
    Train(commands::TrainArgs),
    /// Evaluate a checkpoint on a seeded split.
    Evaluate(commands::EvaluateArgs),
    /// Export attention score matrices from a checkpoint.
    Attention(commands::AttentionArgs),
    /// Input-size reduction experiment: train, recommend, retrain.
    Reduce(commands::ReduceArgs),
    /// Elastic-net benchmark on V/I/T summary features.
    Benchmark(commands::BenchmarkArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.log_level.as_str() {
        "off" => log::LevelFilter::Off,
        "error" => log::LevelFilter::Error,
        "info" => log::LevelFilter::Info,
        "debug" => log::LevelFilter::Debug,
        "trace" => log::LevelFilter::Trace,
        _ => log::LevelFilter::Warn,
    };
    env_logger::Builder::new().filter_level(level).init();

    let ctx = commands::Context {
        file: match config::FileConfig::load(cli.config.as_deref()) {
            Ok(f) => f,
            Err(e) => return fail(&e),
        },
        out: cli.out,
        seed: cli.seed,
        jobs: cli.jobs.unwrap_or(1),
    };

    let result = match cli.command {
        Command::Convert(args) => commands::convert(&ctx, args),
        Command::Synth(args) => commands::synth(&ctx, args),
        Command::Label(args) => commands::label(&ctx, args),
        Command::Train(args) => commands::train(&ctx, args),
        Command::Evaluate(args) => commands::evaluate(&ctx, args),
        Command::Attention(args) => commands::attention(&ctx, args),
        Command::Reduce(args) => commands::reduce(&ctx, args),
        Command::Benchmark(args) => commands::benchmark(&ctx, args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn fail(e: &kneecast_core::Error) -> ExitCode {
    eprintln!("{}", serde_json::json!({ "error": e.to_string() }));
    ExitCode::FAILURE
}
