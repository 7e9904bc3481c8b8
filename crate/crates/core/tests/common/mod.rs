#![allow(dead_code)]

//! Shared helpers for the integration and property tests.

use gittins::model::{random_instance, BanditInstance, GeneratorConfig};
use gittins::Mat;

/// Builds a validated instance from possibly-degenerate raw rows by
/// normalizing each row (falling back to a self-loop when a row has no
/// mass).
pub fn instance_from_raw(
    raw_rows: Vec<Vec<f64>>,
    rewards: Vec<f64>,
    beta: f64,
) -> BanditInstance<f64> {
    let n = raw_rows.len();
    let rows: Vec<Vec<f64>> = raw_rows
        .into_iter()
        .enumerate()
        .map(|(i, mut row)| {
            let sum: f64 = row.iter().sum();
            if sum <= 1e-12 {
                row = vec![0.0; n];
                row[i] = 1.0;
            } else {
                for v in row.iter_mut() {
                    *v /= sum;
                }
            }
            row
        })
        .collect();
    BanditInstance::new(Mat::from_rows(rows).unwrap(), rewards, beta).unwrap()
}

/// Dense random instance for seeded deterministic sweeps.
pub fn seeded_instance(n: usize, beta: f64, seed: u64) -> BanditInstance<f64> {
    let config = GeneratorConfig {
        density: 1.0,
        reward_min: 0.0,
        reward_max: 1.0,
        beta,
    };
    random_instance(n, &config, seed).unwrap()
}

/// Relative deviation with a unit floor, suited to O(1) index values.
pub fn rel_dev(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1.0f64.max(a.abs()).max(b.abs())
}

/// Componentwise maximum of [`rel_dev`].
pub fn max_rel_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| rel_dev(x, y))
        .fold(0.0, f64::max)
}
