//! `gittins gen`: random instance generation.

use std::path::PathBuf;

use clap::Args;
use gittins::model::{random_instance, GeneratorConfig};
use gittins::save_instance;

use crate::{CmdResult, Failure, EXIT_OK};

#[derive(Args)]
pub struct GenArgs {
    /// Number of states (>= 1).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    /// Fraction of nonzero transition entries per row, in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub density: f64,
    /// Discount factor in (0, 1].
    #[arg(long, default_value_t = 0.9)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub reward_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub reward_max: f64,
    /// Generator seed; equal seeds give identical files.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output path for the instance JSON.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &GenArgs) -> CmdResult {
    let config = GeneratorConfig {
        density: args.density,
        reward_min: args.reward_min,
        reward_max: args.reward_max,
        beta: args.beta,
    };
    let instance =
        random_instance::<f64>(args.n as usize, &config, args.seed).map_err(Failure::input)?;
    save_instance(&instance, &args.out).map_err(Failure::input)?;
    println!(
        "wrote {}-state instance (beta = {}, seed = {}) to {}",
        args.n,
        args.beta,
        args.seed,
        args.out.display()
    );
    Ok(EXIT_OK)
}
