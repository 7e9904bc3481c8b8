//! Command-line front end: instance generation, index computation, optimal
//! stopping, cross-algorithm comparison, and flop/runtime benchmarking.
//!
//! Exit codes: 0 success, 2 input error (bad flags or instance files),
//! 3 violated algorithm precondition (e.g. discount 1 where a method
//! requires less), 4 cross-algorithm disagreement beyond tolerance.

mod bench;
mod compare;
mod gen;
mod index;
mod report;
mod stop;

use clap::{Parser, Subcommand};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_DISAGREEMENT: i32 = 4;

/// A command failure carrying the process exit code.
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn input(err: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_INPUT,
            message: err.to_string(),
        }
    }

    pub fn precondition(err: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_PRECONDITION,
            message: err.to_string(),
        }
    }
}

pub type CmdResult = Result<i32, Failure>;

#[derive(Parser)]
#[command(
    name = "gittins",
    version,
    about = "Gittins indices of finite-state bandits and optimal stopping of Markov chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance file.
    Gen(gen::GenArgs),
    /// Compute Gittins indices of an instance with one algorithm.
    Index(index::IndexArgs),
    /// Solve an optimal-stopping instance via the Gittins rule.
    Stop(stop::StopArgs),
    /// Run all applicable algorithms and report their agreement.
    Compare(compare::CompareArgs),
    /// Benchmark the index algorithms (wall clock and flop counts).
    Bench(bench::BenchArgs),
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(args) => gen::run(&args),
        Command::Index(args) => index::run(&args),
        Command::Stop(args) => stop::run(&args),
        Command::Compare(args) => compare::run(&args),
        Command::Bench(args) => bench::run(&args),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            std::process::exit(failure.code);
        }
    }
}
