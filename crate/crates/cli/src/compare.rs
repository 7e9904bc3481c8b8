//! `gittins compare`: run every applicable algorithm and check agreement.

use std::path::PathBuf;

use clap::Args;
use gittins::oracle::{gittins_bruteforce_all, MAX_BRUTEFORCE_STATES};

use crate::index::Algo;
use crate::report::{fmt_float, load, print_table, run_algo};
use crate::{CmdResult, EXIT_DISAGREEMENT, EXIT_OK};

#[derive(Args)]
pub struct CompareArgs {
    /// Instance file (JSON).
    pub instance: PathBuf,
    /// Relative agreement tolerance.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Include the exhaustive oracle (n <= 20, discount < 1).
    #[arg(long)]
    pub oracle: bool,
}

fn rel_dev(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1.0f64.max(a.abs()).max(b.abs())
}

pub fn run(args: &CompareArgs) -> CmdResult {
    let instance = load(&args.instance)?.into_bandit();
    let n = instance.n_states();
    let discounted = !instance.is_undiscounted();

    let algos: Vec<Algo> = if discounted {
        vec![Algo::Fp0, Algo::Fp1, Algo::Cp, Algo::Se, Algo::Vwb]
    } else {
        vec![Algo::Fp0]
    };
    let mut columns: Vec<(String, Vec<f64>)> = Vec::new();
    let mut orders: Vec<(String, Vec<usize>)> = Vec::new();
    let mut all_consistent = true;
    for algo in &algos {
        let result = run_algo(algo.compute(&instance))?;
        all_consistent &= result.is_consistent(1e-12);
        orders.push((algo.name().to_string(), result.order.clone()));
        columns.push((algo.name().to_string(), result.values));
    }
    if args.oracle {
        if !discounted {
            eprintln!("note: skipping the exhaustive oracle at discount 1");
        } else if n > MAX_BRUTEFORCE_STATES {
            eprintln!(
                "note: skipping the exhaustive oracle (n = {n} > {MAX_BRUTEFORCE_STATES})"
            );
        } else {
            columns.push((
                "oracle".to_string(),
                run_algo(gittins_bruteforce_all(&instance))?,
            ));
        }
    }

    let mut headers = vec!["state"];
    for (name, _) in &columns {
        headers.push(name);
    }
    let rows: Vec<Vec<String>> = (0..n)
        .map(|i| {
            let mut row = vec![(i + 1).to_string()];
            for (_, values) in &columns {
                row.push(fmt_float(values[i]));
            }
            row
        })
        .collect();
    print_table(&headers, &rows);

    let mut worst = 0.0f64;
    let mut worst_pair = (String::new(), String::new());
    for a in 0..columns.len() {
        for b in a + 1..columns.len() {
            for i in 0..n {
                let dev = rel_dev(columns[a].1[i], columns[b].1[i]);
                if dev > worst {
                    worst = dev;
                    worst_pair = (columns[a].0.clone(), columns[b].0.clone());
                }
            }
        }
    }

    // Identical nonincreasing value vectors make the selection orders agree
    // automatically up to permutations inside tie groups; report whether
    // they agree literally.
    let orders_identical = orders.windows(2).all(|w| w[0].1 == w[1].1);
    for (name, order) in &orders {
        let shown: Vec<String> = order.iter().map(|&s| (s + 1).to_string()).collect();
        println!("order[{name}]: {}", shown.join(" "));
    }
    println!(
        "orders identical: {} (value agreement covers permutations within ties)",
        if orders_identical { "yes" } else { "no" }
    );

    if columns.len() > 1 {
        println!(
            "max pairwise relative deviation: {worst:.3e} ({} vs {}), tolerance {:.1e}",
            worst_pair.0, worst_pair.1, args.tol
        );
    } else {
        println!("only one applicable algorithm at discount 1; nothing to compare");
    }

    if worst <= args.tol && all_consistent {
        println!("agreement: OK");
        Ok(EXIT_OK)
    } else {
        println!("agreement: FAILED");
        Ok(EXIT_DISAGREEMENT)
    }
}
