use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use balance_dg::harness::CASE_NAMES;
use balance_dg::Error;

mod commands;
mod config;

use config::{RunConfig, KEYS};

fn after_help() -> String {
    let mut s = String::from("Cases:\n");
    for c in CASE_NAMES {
        s += &format!("  {c}\n");
    }
    s += "\nConfig keys (key=value per line, '#' starts a comment):\n";
    for (k, d) in KEYS {
        s += &format!("  {k:<24}{d}\n");
    }
    s += "\nBALANCE_DG_THREADS caps the worker threads (default: all cores for converge and perturb, 1 otherwise).\n";
    s += "Exit status: 2 for configuration errors, 3 for solver failures.";
    s
}

#[derive(Parser)]
#[command(name = "balance-dg", version, about = "Well-balanced DGSEM shallow water solver", after_help = after_help())]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the case to t_final; writes solution.csv, entropy.csv and snapshots.
    Run { config: PathBuf },
    /// Compute the discrete steady state; writes solution.csv.
    Steady { config: PathBuf },
    /// Grid convergence over n_list; writes convergence.csv.
    Converge { config: PathBuf },
    /// Perturbation runs for all scheme presets; writes profile CSVs.
    Perturb { config: PathBuf },
    /// Entropy time series with and without correction; writes entropy CSVs.
    Entropy { config: PathBuf },
}

fn threads(parallel: bool) -> usize {
    let cap = std::env::var("BALANCE_DG_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0);
    match (cap, parallel) {
        (Some(n), _) => n,
        (None, true) => std::thread::available_parallelism().map_or(1, |n| n.get()),
        (None, false) => 1,
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::UnknownCase(_) | Error::UnsupportedDegree(_) => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (path, parallel) = match &cli.command {
        Command::Run { config } | Command::Steady { config } | Command::Entropy { config } => {
            (config, false)
        }
        Command::Converge { config } | Command::Perturb { config } => (config, true),
    };
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return ExitCode::from(2);
        }
    };
    let cfg = match RunConfig::parse(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    };
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads(parallel))
        .build_global();
    let result = match cli.command {
        Command::Run { .. } => commands::run_case(&cfg),
        Command::Steady { .. } => commands::steady(&cfg),
        Command::Converge { .. } => commands::converge(&cfg),
        Command::Perturb { .. } => commands::perturb(&cfg),
        Command::Entropy { .. } => commands::entropy(&cfg),
    };
    match result {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
