mod bench;
mod commands;
mod failure;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use failure::Failure;

#[derive(Parser)]
#[command(name = "rightsize", version, about = "Dynamic right-sizing solvers, online policies and adversaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance offline and print the optimal schedule as JSON.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Algorithm::Poly)]
        algorithm: Algorithm,
        /// Omit `wall_ms` so repeated runs are byte-identical.
        #[arg(long)]
        no_timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an online policy over an instance and print a per-slot CSV trace.
    Simulate {
        instance: PathBuf,
        /// lcp, random-round, algorithm-b or offline.
        #[arg(long, default_value = "lcp")]
        policy: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fractional schedule rounded by random-round.
        #[arg(long, value_enum, default_value_t = Fractional::Hindsight)]
        fractional: Fractional,
        /// Grid resolution `1/grid` of the hindsight fractional optimum.
        #[arg(long, default_value_t = 4)]
        grid: u64,
        /// ε of algorithm B.
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Play a policy against an adaptive adversary and print a duel report.
    Adversary {
        /// discrete, continuous, randomized or restricted.
        #[arg(long)]
        variant: String,
        /// lcp, algorithm-b or random-round.
        #[arg(long)]
        policy: String,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        /// Horizon; defaults to 1/ε².
        #[arg(long = "T")]
        horizon: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = rightsize_core::adversary::DEFAULT_REPLICAS)]
        replicas: usize,
        /// Slope of the continuous restricted embedding.
        #[arg(long, default_value_t = rightsize_core::adversary::DEFAULT_K)]
        k: f64,
        /// Keep playing after the state reaches 0 or 1.
        #[arg(long)]
        full_horizon: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time solvers and policies and write CSV tables into a directory.
    Bench {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        out: PathBuf,
        /// Horizon of the generated instances.
        #[arg(long = "T", default_value_t = 100)]
        horizon: usize,
        #[arg(long, default_value_t = 2)]
        log_m_min: u32,
        #[arg(long, default_value_t = 12)]
        log_m_max: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a seeded random instance as JSON.
    Generate {
        #[arg(long = "T")]
        horizon: usize,
        #[arg(long)]
        m: u64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Kind::Table)]
        kind: Kind,
        /// Slope range of random tables.
        #[arg(long, default_value_t = 3.0)]
        scale: f64,
        #[arg(long)]
        symmetric: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Algorithm {
    Poly,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fractional {
    Hindsight,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Offline,
    Lcp,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Table,
    Affine,
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { instance, algorithm, no_timing, out } => {
            commands::solve(&instance, algorithm, !no_timing, out.as_deref())
        }
        Command::Simulate { instance, policy, seed, fractional: Fractional::Hindsight, grid, eps, out } => {
            commands::simulate(&instance, &policy, seed, grid, eps, out.as_deref())
        }
        Command::Adversary { variant, policy, eps, horizon, seed, replicas, k, full_horizon, out } => {
            let args = commands::DuelArgs { variant, policy, eps, horizon, seed, replicas, k, full_horizon };
            commands::adversary(&args, out.as_deref())
        }
        Command::Bench { suite, out, horizon, log_m_min, log_m_max, seed } => {
            let cfg = bench::BenchConfig { horizon, log_m_min, log_m_max, seed };
            match suite {
                Suite::Offline => bench::offline(&cfg, &out),
                Suite::Lcp => bench::lcp(&cfg, &out),
                Suite::Random => bench::random(&cfg, &out),
            }
        }
        Command::Generate { horizon, m, beta, seed, kind, scale, symmetric, out } => {
            let affine = matches!(kind, Kind::Affine);
            commands::generate(horizon, m, beta, seed, affine, scale, symmetric, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
