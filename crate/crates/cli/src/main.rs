//! `subnet-mine`: generate C/E nets, mine frequent subnets, check planted
//! answers and benchmark the two engines.

mod alloc;
mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use manifest::RunManifest;

#[global_allocator]
static ALLOC: alloc::Counting = alloc::Counting;

#[derive(Parser)]
#[command(name = "subnet-mine", version, about = "Frequent subnet mining in a single large C/E net")]
struct Cli {
    /// File that receives one JSON manifest line per run.
    #[arg(long, global = true, default_value = "subnet-mine-runs.jsonl")]
    manifest: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random net, optionally with planted copies and a truth file.
    Gen(commands::GenArgs),
    /// Mine frequent subnets with either engine.
    Mine(commands::MineArgs),
    /// Arc and net-graph edge counts of one or more nets.
    Stats(commands::StatsArgs),
    /// Check a mining result against a planting truth file.
    Check(commands::CheckArgs),
    /// Time both engines over a sweep of generated nets.
    Bench(commands::BenchArgs),
    /// Write the net graph, the c-type net graph or the dual of a net.
    Transform(commands::TransformArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // help and version requests are not errors
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let start = Instant::now();
    let (name, result) = match &cli.command {
        Command::Gen(a) => ("gen", commands::gen(a)),
        Command::Mine(a) => ("mine", commands::mine(a)),
        Command::Stats(a) => ("stats", commands::stats(a)),
        Command::Check(a) => ("check", commands::check(a)),
        Command::Bench(a) => ("bench", commands::bench(a)),
        Command::Transform(a) => ("transform", commands::transform(a)),
    };
    let (code, run) = match result {
        Ok(run) => (run.code, run),
        Err(e) => {
            eprintln!("error: {e:#}");
            (2, commands::Run::default())
        }
    };
    let m = RunManifest {
        command: name.to_string(),
        config: run.config,
        seed: run.seed,
        inputs: run.inputs,
        outputs: run.outputs,
        wall_seconds: start.elapsed().as_secs_f64(),
        peak_heap_bytes: alloc::peak_bytes(),
        exit_code: code,
        version: env!("CARGO_PKG_VERSION"),
    };
    if let Err(e) = m.append(&cli.manifest) {
        eprintln!("warning: cannot write manifest {}: {e}", cli.manifest.display());
    }
    ExitCode::from(code)
}
