//! `gittins index`: index computation with a selected algorithm.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use gittins::model::{BanditInstance, IndexResult};
use gittins::{cp_compute, fp_compute, se_compute, vwb_compute};

use crate::report::{fmt_float, load, print_table, run_algo, write_report};
use crate::{CmdResult, EXIT_OK};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    /// Fast pivoting, (2/3) n^3.
    Fp0,
    /// Fast pivoting with extended bookkeeping, (4/3) n^3.
    Fp1,
    /// Conventional pivoting, 2 n^3.
    Cp,
    /// State elimination, n^3.
    Se,
    /// Repeated linear solves, (1/3) n^4.
    Vwb,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Fp0 => "fp0",
            Algo::Fp1 => "fp1",
            Algo::Cp => "cp",
            Algo::Se => "se",
            Algo::Vwb => "vwb",
        }
    }

    pub fn compute(self, instance: &BanditInstance<f64>) -> gittins::Result<IndexResult<f64>> {
        match self {
            Algo::Fp0 => fp_compute(instance, false),
            Algo::Fp1 => fp_compute(instance, true),
            Algo::Cp => cp_compute(instance),
            Algo::Se => se_compute(instance),
            Algo::Vwb => vwb_compute(instance),
        }
    }
}

#[derive(Args)]
pub struct IndexArgs {
    /// Instance file (JSON).
    pub instance: PathBuf,
    #[arg(long, value_enum)]
    pub algo: Algo,
    /// Also report the arithmetic-operation counters.
    #[arg(long)]
    pub flops: bool,
    /// Write the report to a .csv or .json file as well.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &IndexArgs) -> CmdResult {
    let instance = load(&args.instance)?.into_bandit();
    let result = run_algo(args.algo.compute(&instance))?;

    let mut rank_of = vec![0usize; instance.n_states()];
    for (rank, &state) in result.order.iter().enumerate() {
        rank_of[state] = rank + 1;
    }

    let mut headers = vec!["state", "index", "rank"];
    if args.flops {
        headers.push("muldiv");
        headers.push("addsub");
    }
    let rows: Vec<Vec<String>> = (0..instance.n_states())
        .map(|i| {
            let mut row = vec![
                (i + 1).to_string(),
                fmt_float(result.values[i]),
                rank_of[i].to_string(),
            ];
            if args.flops {
                row.push(result.flops.muldiv.to_string());
                row.push(result.flops.addsub.to_string());
            }
            row
        })
        .collect();

    println!("algorithm: {}", args.algo.name());
    print_table(&headers, &rows);
    if args.flops {
        println!(
            "flops: muldiv = {}, addsub = {}, total = {}",
            result.flops.muldiv,
            result.flops.addsub,
            result.flops.total()
        );
    }

    if let Some(path) = &args.out {
        let json = serde_json::json!({
            "algo": args.algo.name(),
            "states": (0..instance.n_states()).map(|i| serde_json::json!({
                "state": i + 1,
                "index": result.values[i],
                "rank": rank_of[i],
            })).collect::<Vec<_>>(),
            "flops": {
                "muldiv": result.flops.muldiv,
                "addsub": result.flops.addsub,
            },
        });
        write_report(path, &headers, &rows, &json)?;
    }
    Ok(EXIT_OK)
}
