//! Index computation by repeated linear solves.
//!
//! Baseline that, at each step, solves the two continuation-set systems
//!
//! ```text
//! a_i = beta R_i + beta sum_{j in S} p_ij a_j
//! b_i = beta     + beta sum_{j in S} p_ij b_j
//! ```
//!
//! restricted to the current set `S`, extends both to the remaining states
//! by the defining recursions, and selects the state maximizing `a_i/b_i`.
//! Each step refactorizes the two systems from scratch, so the run costs
//! `(1/3) n^4 + O(n^3)` arithmetic operations; it exists as a
//! cross-validation and benchmarking reference, not as a practical method.

use crate::counter::OpCounter;
use crate::error::{Error, Result};
use crate::linsolve::solve_dense_counted;
use crate::matrix::Mat;
use crate::model::{BanditInstance, IndexResult};
use crate::scalar::Scalar;

/// Computes all Gittins indices by per-step linear solves.
pub fn vwb_compute<S: Scalar>(instance: &BanditInstance<S>) -> Result<IndexResult<S>> {
    let beta = instance.discount();
    if instance.is_undiscounted() {
        return Err(Error::bad_discount(
            1.0,
            "this baseline only applies to discount < 1 (its solved systems \
             become singular on recurrent sets)",
        ));
    }
    let n = instance.n_states();
    let p = instance.transitions();
    let rewards = instance.rewards();
    let mut ops = OpCounter::new();

    let mut values = vec![S::zero(); n];
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut active: Vec<usize> = (0..n).collect();
    let mut num = vec![S::zero(); n];
    let mut den = vec![S::zero(); n];

    for _k in 1..=n {
        let set = &order;
        let m = set.len();
        if m > 0 {
            // Two solves on the current set, refactorized independently.
            let mut lhs = Mat::zeros(m, m);
            for (a, &i) in set.iter().enumerate() {
                for (b, &j) in set.iter().enumerate() {
                    let scaled = beta * p[(i, j)];
                    lhs[(a, b)] = if a == b { S::one() - scaled } else { -scaled };
                }
                ops.count_muldiv(m as u64);
                ops.count_addsub(1);
            }
            let mut rhs_num = Mat::zeros(m, 1);
            let mut rhs_den = Mat::zeros(m, 1);
            for (a, &i) in set.iter().enumerate() {
                rhs_num[(a, 0)] = beta * rewards[i];
                rhs_den[(a, 0)] = beta;
            }
            ops.count_muldiv(m as u64);
            let sol_num = solve_dense_counted(&lhs, &rhs_num, &mut ops)?;
            let sol_den = solve_dense_counted(&lhs, &rhs_den, &mut ops)?;
            for (a, &i) in set.iter().enumerate() {
                num[i] = sol_num[(a, 0)];
                den[i] = sol_den[(a, 0)];
            }
            // Extend to the remaining states by the defining recursions.
            for &i in &active {
                let row = p.row(i);
                let mut dot_num = S::zero();
                let mut dot_den = S::zero();
                for &j in set {
                    dot_num = dot_num + row[j] * num[j];
                    dot_den = dot_den + row[j] * den[j];
                }
                num[i] = beta * rewards[i] + beta * dot_num;
                den[i] = beta + beta * dot_den;
            }
            let mm = m as u64;
            let act = active.len() as u64;
            ops.count_muldiv(act * (2 * mm + 3));
            ops.count_addsub(act * (2 * mm.saturating_sub(1) + 2));
        } else {
            for &i in &active {
                num[i] = beta * rewards[i];
                den[i] = beta;
            }
            ops.count_muldiv(active.len() as u64);
        }

        let mut best = usize::MAX;
        let mut best_ratio = S::neg_infinity();
        for &i in &active {
            let ratio = num[i] / den[i];
            if best == usize::MAX || ratio > best_ratio {
                best = i;
                best_ratio = ratio;
            }
        }
        ops.count_muldiv(active.len() as u64);

        let pos = active.iter().position(|&i| i == best).expect("active state");
        active.remove(pos);
        values[best] = best_ratio;
        order.push(best);
    }

    Ok(IndexResult {
        order,
        values,
        flops: ops,
    })
}
