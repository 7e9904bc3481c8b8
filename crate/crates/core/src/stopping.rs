//! Optimal stopping of a Markov chain via the Gittins index.
//!
//! Terminal rewards are folded into the running rewards,
//!
//! ```text
//! R_hat = R - (I - beta P) Q,
//! ```
//!
//! which leaves a zero-terminal-reward problem whose Gittins indices
//! decide stopping: stop at `i` iff `index_hat_i <= nu`. A value-iteration
//! solver and a fixed-rule evaluator are provided as independent oracles.

use crate::error::{Error, Result};
use crate::fp::fp_compute;
use crate::linsolve::{evaluate_policy, solve_dense};
use crate::matrix::Mat;
use crate::model::StoppingInstance;
use crate::scalar::Scalar;

/// States whose index is within this absolute distance of the charge are
/// treated as ties and placed in the stopping set (the rule is non-strict).
pub const STOP_BOUNDARY_TOL: f64 = 1e-12;

/// Solution of an optimal-stopping instance.
#[derive(Clone, Debug)]
pub struct StoppingSolution<S> {
    /// Rewards of the reduced zero-terminal-reward problem.
    pub modified_rewards: Vec<S>,
    /// Gittins indices of the reduced problem.
    pub index: Vec<S>,
    /// States where stopping is optimal, ascending.
    pub stop_set: Vec<usize>,
    /// Optimal value per state; `None` at discount 1, where only the
    /// stopping set is defined.
    pub value: Option<Vec<S>>,
}

impl<S> StoppingSolution<S> {
    pub fn should_stop(&self, state: usize) -> bool {
        self.stop_set.binary_search(&state).is_ok()
    }
}

/// Folds terminal rewards into running rewards: `R - (I - beta P) Q`.
pub fn reduce_terminal_rewards<S: Scalar>(instance: &StoppingInstance<S>) -> Vec<S> {
    let base = instance.base();
    let beta = base.discount();
    let pq = base.transitions().mul_vec(instance.terminal_rewards());
    base.rewards()
        .iter()
        .zip(instance.terminal_rewards())
        .zip(&pq)
        .map(|((&r, &q), &flow)| r - (q - beta * flow))
        .collect()
}

/// Solves the stopping problem: reduces terminal rewards, computes the
/// Gittins indices of the reduced bandit, derives the stopping set, and
/// (for discount < 1) evaluates the resulting rule.
pub fn solve_optimal_stopping<S: Scalar>(
    instance: &StoppingInstance<S>,
) -> Result<StoppingSolution<S>> {
    let base = instance.base();
    let n = base.n_states();
    let charge = instance.charge();
    let modified_rewards = reduce_terminal_rewards(instance);
    let reduced = base.with_rewards(modified_rewards.clone())?;
    let index_result = fp_compute(&reduced, false)?;
    let index = index_result.values;

    let boundary = S::from_f64(STOP_BOUNDARY_TOL);
    let stop_set: Vec<usize> = (0..n)
        .filter(|&i| index[i] <= charge + boundary)
        .collect();

    let value = if base.is_undiscounted() {
        None
    } else {
        // Value by the reduction: Q plus the reduced problem's value under
        // the continue-outside-the-stop-set rule with rewards R_hat - nu.
        let continue_set: Vec<usize> =
            (0..n).filter(|i| !stop_set.contains(i)).collect();
        let shifted: Vec<S> = modified_rewards.iter().map(|&r| r - charge).collect();
        let measures = evaluate_policy(&base.with_rewards(shifted)?, &continue_set)?;
        Some(
            instance
                .terminal_rewards()
                .iter()
                .zip(&measures.reward)
                .map(|(&q, &f)| q + f)
                .collect(),
        )
    };

    Ok(StoppingSolution {
        modified_rewards,
        index,
        stop_set,
        value,
    })
}

/// Successive approximation of the stopping value function from `V = Q`,
/// with the standard geometric stopping bound so `tol` is a true sup-norm
/// guarantee on the returned iterate.
pub fn value_iteration<S: Scalar>(instance: &StoppingInstance<S>, tol: S) -> Result<Vec<S>> {
    let base = instance.base();
    let beta = base.discount();
    if base.is_undiscounted() {
        return Err(Error::bad_discount(
            1.0,
            "value iteration requires discount < 1",
        ));
    }
    if tol.is_nan() || tol <= S::zero() {
        return Err(Error::NonFiniteValue("tolerance must be positive".into()));
    }
    let q = instance.terminal_rewards();
    let r = base.rewards();
    let charge = instance.charge();
    let contraction = beta / (S::one() - beta);

    let mut v = q.to_vec();
    loop {
        let flow = base.transitions().mul_vec(&v);
        let mut delta = S::zero();
        let mut next = Vec::with_capacity(v.len());
        for i in 0..v.len() {
            let cont = r[i] - charge + beta * flow[i];
            let updated = q[i].max(cont);
            delta = delta.max((updated - v[i]).abs());
            next.push(updated);
        }
        v = next;
        if contraction * delta <= tol {
            return Ok(v);
        }
    }
}

/// Value of the fixed rule that continues exactly on `continue_set`:
/// the linear fixed point of continuing there (paying the charge) and
/// collecting the terminal reward elsewhere. At discount 1 the continue
/// set must be transient.
pub fn evaluate_stopping_rule<S: Scalar>(
    instance: &StoppingInstance<S>,
    continue_set: &[usize],
) -> Result<Vec<S>> {
    let base = instance.base();
    let n = base.n_states();
    let beta = base.discount();
    let p = base.transitions();
    let q = instance.terminal_rewards();
    let charge = instance.charge();

    let mut sorted = continue_set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != continue_set.len() {
        return Err(Error::dims("continue set has repeated states"));
    }
    if sorted.iter().any(|&i| i >= n) {
        return Err(Error::dims("continue set state out of range"));
    }
    let mut in_set = vec![false; n];
    for &i in &sorted {
        in_set[i] = true;
    }

    let mut value: Vec<S> = q.to_vec();
    if !sorted.is_empty() {
        let m = sorted.len();
        let mut lhs = Mat::zeros(m, m);
        let mut rhs = Mat::zeros(m, 1);
        for (a, &i) in sorted.iter().enumerate() {
            for (b, &j) in sorted.iter().enumerate() {
                let scaled = beta * p[(i, j)];
                lhs[(a, b)] = if a == b { S::one() - scaled } else { -scaled };
            }
            let mut outflow = S::zero();
            for j in 0..n {
                if !in_set[j] {
                    outflow = outflow + p[(i, j)] * q[j];
                }
            }
            rhs[(a, 0)] = base.rewards()[i] - charge + beta * outflow;
        }
        let x = solve_dense(&lhs, &rhs)?;
        for (a, &i) in sorted.iter().enumerate() {
            value[i] = x[(a, 0)];
        }
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::BanditInstance;
    use approx::assert_abs_diff_eq;

    fn bandit(p: Vec<Vec<f64>>, r: Vec<f64>, beta: f64) -> BanditInstance<f64> {
        BanditInstance::new(Mat::from_rows(p).unwrap(), r, beta).unwrap()
    }

    fn two_state(q: Vec<f64>, nu: f64) -> StoppingInstance<f64> {
        StoppingInstance::new(
            bandit(vec![vec![0.5, 0.5], vec![0.5, 0.5]], vec![1.0, 0.0], 0.5),
            q,
            nu,
        )
        .unwrap()
    }

    #[test]
    fn zero_terminal_rewards_leave_rewards_unchanged() {
        let inst = two_state(vec![0.0, 0.0], 0.0);
        assert_eq!(reduce_terminal_rewards(&inst), vec![1.0, 0.0]);
    }

    #[test]
    fn constant_terminal_rewards_shift_by_one_minus_beta() {
        let c = 3.0;
        let inst = two_state(vec![c, c], 0.0);
        let rhat = reduce_terminal_rewards(&inst);
        assert_abs_diff_eq!(rhat[0], 1.0 - 0.5 * c, epsilon = 1e-15);
        assert_abs_diff_eq!(rhat[1], 0.0 - 0.5 * c, epsilon = 1e-15);
    }

    #[test]
    fn reduction_matches_hand_matrix_arithmetic() {
        let inst = two_state(vec![2.0, 4.0], 0.0);
        let rhat = reduce_terminal_rewards(&inst);
        assert_abs_diff_eq!(rhat[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rhat[1], -2.5, epsilon = 1e-15);
    }

    #[test]
    fn never_profitable_to_continue_stops_everywhere() {
        let inst = StoppingInstance::new(
            bandit(vec![vec![0.5, 0.5], vec![0.5, 0.5]], vec![-1.0, -1.0], 0.5),
            vec![0.0, 0.0],
            0.0,
        )
        .unwrap();
        let sol = solve_optimal_stopping(&inst).unwrap();
        assert_eq!(sol.stop_set, vec![0, 1]);
        let value = sol.value.unwrap();
        assert_abs_diff_eq!(value[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(value[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn gittins_rule_on_the_worked_instance() {
        let inst = two_state(vec![0.0, 0.0], 0.5);
        let sol = solve_optimal_stopping(&inst).unwrap();
        assert_abs_diff_eq!(sol.index[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(sol.index[1], 0.25, epsilon = 1e-14);
        assert_eq!(sol.stop_set, vec![1]);
        assert!(!sol.should_stop(0));
        let value = sol.value.unwrap();
        assert_abs_diff_eq!(value[0], 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(value[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn indifferent_rewards_give_zero_value() {
        let inst = StoppingInstance::new(
            bandit(vec![vec![0.5, 0.5], vec![0.5, 0.5]], vec![0.5, 0.5], 0.5),
            vec![0.0, 0.0],
            0.5,
        )
        .unwrap();
        let v = value_iteration(&inst, 1e-10).unwrap();
        assert_abs_diff_eq!(v[0], 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(v[1], 0.0, epsilon = 1e-9);
    }

    #[test]
    fn value_iteration_on_the_worked_instance() {
        // Continue at state 1, stop at state 2: V = (2/3, 0).
        let inst = two_state(vec![0.0, 0.0], 0.5);
        let v = value_iteration(&inst, 1e-10).unwrap();
        assert_abs_diff_eq!(v[0], 2.0 / 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(v[1], 0.0, epsilon = 1e-9);
    }

    #[test]
    fn huge_terminal_rewards_dominate() {
        let q = 1e6;
        let inst = two_state(vec![q, q], 0.5);
        let v = value_iteration(&inst, 1e-8).unwrap();
        assert_abs_diff_eq!(v[0], q, epsilon = 1e-7);
        assert_abs_diff_eq!(v[1], q, epsilon = 1e-7);
        let sol = solve_optimal_stopping(&inst).unwrap();
        assert_eq!(sol.stop_set, vec![0, 1]);
        let value = sol.value.unwrap();
        assert_abs_diff_eq!(value[0], q, epsilon = 1e-9);
        assert_abs_diff_eq!(value[1], q, epsilon = 1e-9);
    }

    #[test]
    fn empty_continue_set_returns_terminal_rewards() {
        let inst = two_state(vec![2.0, 4.0], 0.5);
        assert_eq!(evaluate_stopping_rule(&inst, &[]).unwrap(), vec![2.0, 4.0]);
    }

    #[test]
    fn singleton_continue_set_matches_hand_fixed_point() {
        let inst = two_state(vec![0.0, 0.0], 0.5);
        let v = evaluate_stopping_rule(&inst, &[0]).unwrap();
        assert_abs_diff_eq!(v[0], 2.0 / 3.0, epsilon = 1e-13);
        assert_abs_diff_eq!(v[1], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn value_iteration_is_the_best_stationary_rule() {
        // Exhaustive check over all continue sets on a 3-state instance.
        let inst = StoppingInstance::new(
            bandit(
                vec![
                    vec![0.2, 0.5, 0.3],
                    vec![0.4, 0.1, 0.5],
                    vec![0.25, 0.25, 0.5],
                ],
                vec![0.8, -0.2, 0.4],
                0.9,
            ),
            vec![0.5, 1.0, -0.5],
            0.3,
        )
        .unwrap();
        let vi = value_iteration(&inst, 1e-10).unwrap();
        let n = 3;
        let mut best = vec![f64::NEG_INFINITY; n];
        for mask in 0u32..(1 << n) {
            let set: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let v = evaluate_stopping_rule(&inst, &set).unwrap();
            for i in 0..n {
                best[i] = best[i].max(v[i]);
            }
        }
        for i in 0..n {
            assert_abs_diff_eq!(vi[i], best[i], epsilon = 1e-8);
        }
    }

    #[test]
    fn value_iteration_rejects_discount_one() {
        let inst = StoppingInstance::new(
            bandit(vec![vec![1.0]], vec![1.0], 1.0),
            vec![0.0],
            0.0,
        )
        .unwrap();
        assert!(matches!(
            value_iteration(&inst, 1e-8),
            Err(Error::BadDiscount { .. })
        ));
    }

    #[test]
    fn undiscounted_solution_has_stop_set_but_no_value() {
        let inst = StoppingInstance::new(
            bandit(
                vec![vec![0.2, 0.8], vec![0.6, 0.4]],
                vec![1.0, -1.0],
                1.0,
            ),
            vec![0.0, 0.0],
            0.1,
        )
        .unwrap();
        let sol = solve_optimal_stopping(&inst).unwrap();
        assert!(sol.value.is_none());
        assert!(!sol.stop_set.is_empty() || sol.index.iter().all(|&v| v > 0.1));
    }
}
