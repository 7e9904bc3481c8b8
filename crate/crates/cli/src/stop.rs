//! `gittins stop`: optimal stopping via the Gittins rule.

use std::path::PathBuf;

use clap::Args;
use gittins::model::StoppingInstance;
use gittins::stopping::{solve_optimal_stopping, value_iteration};

use crate::report::{fmt_float, load, print_table, run_algo, write_report};
use crate::{CmdResult, Failure, EXIT_OK};

#[derive(Args)]
pub struct StopArgs {
    /// Stopping-instance file (JSON with terminal rewards "Q").
    pub instance: PathBuf,
    /// Continuation charge; overrides the file's "nu".
    #[arg(long)]
    pub nu: Option<f64>,
    /// Cross-check the value vector against value iteration.
    #[arg(long)]
    pub check_vi: bool,
    /// Value-iteration sup-norm tolerance.
    #[arg(long, default_value_t = 1e-9)]
    pub vi_tol: f64,
    /// Write the report to a .csv or .json file as well.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &StopArgs) -> CmdResult {
    let loaded = load(&args.instance)?;
    let instance: StoppingInstance<f64> = match loaded.as_stopping() {
        Some(s) => s.clone(),
        None => {
            return Err(Failure::input(format!(
                "{} has no terminal rewards \"Q\"; `stop` needs a stopping instance",
                args.instance.display()
            )))
        }
    };
    let instance = match args.nu {
        Some(nu) => instance.with_charge(nu).map_err(Failure::input)?,
        None => instance,
    };
    let solution = run_algo(solve_optimal_stopping(&instance))?;

    let n = instance.n_states();
    let discounted = solution.value.is_some();
    let mut headers = vec!["state", "modified_reward", "index", "decision"];
    if discounted {
        headers.push("value");
    }
    let rows: Vec<Vec<String>> = (0..n)
        .map(|i| {
            let mut row = vec![
                (i + 1).to_string(),
                fmt_float(solution.modified_rewards[i]),
                fmt_float(solution.index[i]),
                if solution.should_stop(i) { "stop" } else { "continue" }.to_string(),
            ];
            if let Some(value) = &solution.value {
                row.push(fmt_float(value[i]));
            }
            row
        })
        .collect();

    println!("continuation charge (nu): {}", fmt_float(instance.charge()));
    print_table(&headers, &rows);
    if !discounted {
        println!("discount 1: only the stopping set is defined (no value column)");
    }

    let mut vi_gap = None;
    if args.check_vi {
        let value = solution.value.as_ref().ok_or_else(|| {
            Failure::precondition("--check-vi requires discount < 1")
        })?;
        let vi = run_algo(value_iteration(&instance, args.vi_tol))?;
        let gap = value
            .iter()
            .zip(&vi)
            .map(|(&a, &b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        println!("value-iteration cross-check: sup-norm gap = {gap:.3e}");
        vi_gap = Some(gap);
    }

    if let Some(path) = &args.out {
        let json = serde_json::json!({
            "nu": instance.charge(),
            "states": (0..n).map(|i| serde_json::json!({
                "state": i + 1,
                "modified_reward": solution.modified_rewards[i],
                "index": solution.index[i],
                "stop": solution.should_stop(i),
                "value": solution.value.as_ref().map(|v| v[i]),
            })).collect::<Vec<_>>(),
            "vi_gap": vi_gap,
        });
        write_report(path, &headers, &rows, &json)?;
    }
    Ok(EXIT_OK)
}
