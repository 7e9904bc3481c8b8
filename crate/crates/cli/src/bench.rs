//! `gittins bench`: flop-count and wall-clock comparison across algorithms.
//!
//! Wall-clock speedups are reported, never asserted: measured runtimes are
//! hardware- and layout-bound, while the flop columns are exact and
//! reproducible for a fixed seed.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use gittins::model::{random_instance, BanditInstance, GeneratorConfig};

use crate::index::Algo;
use crate::report::to_csv;
use crate::{CmdResult, Failure, EXIT_OK};

#[derive(Args)]
pub struct BenchArgs {
    /// Comma-separated state counts, e.g. 100,200,500.
    #[arg(long, value_delimiter = ',', required = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub sizes: Vec<u64>,
    /// Algorithms to run.
    #[arg(long, value_enum, value_delimiter = ',',
          default_values_t = [Algo::Fp0, Algo::Fp1, Algo::Cp, Algo::Se])]
    pub algos: Vec<Algo>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Repetitions per cell; the median wall-clock time is reported.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    pub reps: u64,
    #[arg(long, default_value_t = 0.9)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub density: f64,
    /// Skip the n^4 baseline above this size.
    #[arg(long, default_value_t = 500)]
    pub vwb_cap: u64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

struct Row {
    n: usize,
    algo: Algo,
    seconds: f64,
    muldiv: u64,
    addsub: u64,
    flops_per_n3: f64,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[mid]
    } else {
        0.5 * (xs[mid - 1] + xs[mid])
    }
}

pub fn run(args: &BenchArgs) -> CmdResult {
    let config = GeneratorConfig {
        density: args.density,
        reward_min: 0.0,
        reward_max: 1.0,
        beta: args.beta,
    };

    let mut rows: Vec<Row> = Vec::new();
    for &n_raw in &args.sizes {
        let n = n_raw as usize;
        let instance: BanditInstance<f64> =
            random_instance(n, &config, args.seed).map_err(Failure::input)?;
        for &algo in &args.algos {
            if algo == Algo::Vwb && n_raw > args.vwb_cap {
                eprintln!(
                    "note: skipping vwb at n = {n} (cap {}; its cost grows as n^4)",
                    args.vwb_cap
                );
                continue;
            }
            let mut durations = Vec::with_capacity(args.reps as usize);
            let mut flops = None;
            for _ in 0..args.reps {
                let started = Instant::now();
                let result = algo.compute(&instance).map_err(Failure::precondition)?;
                durations.push(started.elapsed().as_secs_f64());
                flops.get_or_insert(result.flops);
            }
            let flops = flops.expect("at least one rep");
            let denom = if algo == Algo::Vwb {
                (n as f64).powi(4)
            } else {
                (n as f64).powi(3)
            };
            rows.push(Row {
                n,
                algo,
                seconds: median(durations),
                muldiv: flops.muldiv,
                addsub: flops.addsub,
                flops_per_n3: flops.total() as f64 / denom,
            });
        }
    }

    // Speedup columns exist only when both operand algorithms ran.
    let ran = |a: Algo| args.algos.contains(&a);
    let speedups: [(&str, Algo, Algo); 4] = [
        ("speedup_fp1_fp0", Algo::Fp1, Algo::Fp0),
        ("speedup_cp_fp0", Algo::Cp, Algo::Fp0),
        ("speedup_se_fp0", Algo::Se, Algo::Fp0),
        ("speedup_fp1_cp", Algo::Fp1, Algo::Cp),
    ];
    let enabled: Vec<&(&str, Algo, Algo)> = speedups
        .iter()
        .filter(|(_, num, den)| ran(*num) && ran(*den))
        .collect();

    let mut headers = vec!["n", "algo", "seconds", "muldiv", "addsub", "flops_per_n3"];
    for (name, _, _) in &enabled {
        headers.push(name);
    }

    let time_of = |n: usize, algo: Algo| -> Option<f64> {
        rows.iter()
            .find(|r| r.n == n && r.algo == algo)
            .map(|r| r.seconds)
    };
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            let mut cells = vec![
                row.n.to_string(),
                row.algo.name().to_string(),
                format!("{:.6}", row.seconds),
                row.muldiv.to_string(),
                row.addsub.to_string(),
                format!("{:.6}", row.flops_per_n3),
            ];
            for (_, num, den) in &enabled {
                let cell = match (time_of(row.n, *num), time_of(row.n, *den)) {
                    (Some(t_num), Some(t_den)) if t_den > 0.0 => {
                        format!("{:.3}", t_num / t_den)
                    }
                    _ => String::new(),
                };
                cells.push(cell);
            }
            cells
        })
        .collect();

    let csv = to_csv(&headers, &table);
    match &args.out {
        Some(path) => std::fs::write(path, csv).map_err(Failure::input)?,
        None => print!("{csv}"),
    }
    Ok(EXIT_OK)
}
