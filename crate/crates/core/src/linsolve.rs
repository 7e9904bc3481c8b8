//! Dense linear solving and stationary-policy evaluation.
//!
//! [`solve_dense`] is Gaussian elimination with partial (row) pivoting; a
//! pivot below 1e-12 times the largest initial magnitude of its column is
//! treated as singular. [`evaluate_policy`] solves the policy fixed point
//!
//! ```text
//! g_i = 1   + beta * sum_{j in S} p_ij g_j,   i in S
//! f_i = R_i + beta * sum_{j in S} p_ij f_j,   i in S
//! ```
//!
//! on the continuation set `S` only (an |S| x |S| system), with `g`, `f`
//! zero off `S`. At discount 1 a singular system signals a recurrent
//! sub-chain on `S`.

use crate::counter::OpCounter;
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::model::BanditInstance;
use crate::scalar::Scalar;

/// Relative pivot threshold for declaring singularity.
pub const PIVOT_RTOL: f64 = 1e-12;

/// Work and reward measures of the policy that continues exactly on `set`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolicyMeasures<S> {
    /// Expected discounted time continuing, per initial state; zero off the set.
    pub work: Vec<S>,
    /// Expected discounted reward, per initial state; zero off the set.
    pub reward: Vec<S>,
    /// The continuation set (ascending state numbers).
    pub set: Vec<usize>,
}

/// Solves `A X = B` by Gaussian elimination with partial pivoting,
/// tallying arithmetic into `ops`.
pub fn solve_dense_counted<S: Scalar>(
    a: &Mat<S>,
    b: &Mat<S>,
    ops: &mut OpCounter,
) -> Result<Mat<S>> {
    let m = a.n_rows();
    if a.n_cols() != m {
        return Err(Error::dims(format!(
            "coefficient matrix is {}x{}, expected square",
            m,
            a.n_cols()
        )));
    }
    if b.n_rows() != m {
        return Err(Error::dims(format!(
            "right-hand side has {} rows, expected {m}",
            b.n_rows()
        )));
    }
    let k = b.n_cols();
    let mut lhs = a.clone();
    let mut rhs = b.clone();

    // Singularity thresholds: relative to the largest initial magnitude of
    // each column.
    let thresholds: Vec<S> = (0..m)
        .map(|j| {
            let mut best = S::zero();
            for i in 0..m {
                best = best.max(lhs[(i, j)].abs());
            }
            best * S::from_f64(PIVOT_RTOL)
        })
        .collect();

    for col in 0..m {
        let mut pivot_row = col;
        let mut pivot_mag = lhs[(col, col)].abs();
        for r in col + 1..m {
            let mag = lhs[(r, col)].abs();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if pivot_mag.is_nan() || pivot_mag == S::zero() || pivot_mag <= thresholds[col] {
            return Err(Error::SingularMatrix { col });
        }
        lhs.swap_rows(col, pivot_row);
        rhs.swap_rows(col, pivot_row);

        let pivot = lhs[(col, col)];
        for r in col + 1..m {
            let factor = lhs[(r, col)] / pivot;
            ops.count_muldiv(1);
            lhs[(r, col)] = S::zero();
            for c in col + 1..m {
                let upd = lhs[(r, c)] - factor * lhs[(col, c)];
                lhs[(r, c)] = upd;
            }
            for c in 0..k {
                let upd = rhs[(r, c)] - factor * rhs[(col, c)];
                rhs[(r, c)] = upd;
            }
            ops.count_muldiv((m - col - 1 + k) as u64);
            ops.count_addsub((m - col - 1 + k) as u64);
        }
    }

    // Back substitution.
    let mut x = Mat::zeros(m, k);
    for c in 0..k {
        for i in (0..m).rev() {
            let mut acc = rhs[(i, c)];
            for j in i + 1..m {
                acc = acc - lhs[(i, j)] * x[(j, c)];
            }
            ops.count_muldiv((m - i - 1) as u64);
            ops.count_addsub((m - i - 1) as u64);
            x[(i, c)] = acc / lhs[(i, i)];
            ops.count_muldiv(1);
        }
    }
    Ok(x)
}

/// Solves `A X = B`; see [`solve_dense_counted`].
pub fn solve_dense<S: Scalar>(a: &Mat<S>, b: &Mat<S>) -> Result<Mat<S>> {
    let mut scratch = OpCounter::new();
    solve_dense_counted(a, b, &mut scratch)
}

/// Builds the continuation-set system `I_S - beta * P_SS` and the two
/// right-hand sides `1_S`, `R_S`, tallying construction arithmetic.
pub(crate) fn continuation_system<S: Scalar>(
    instance: &BanditInstance<S>,
    set: &[usize],
    ops: &mut OpCounter,
) -> (Mat<S>, Mat<S>) {
    let m = set.len();
    let beta = instance.discount();
    let mut lhs = Mat::zeros(m, m);
    let mut rhs = Mat::zeros(m, 2);
    for (a, &i) in set.iter().enumerate() {
        for (b, &j) in set.iter().enumerate() {
            let scaled = beta * instance.transition(i, j);
            lhs[(a, b)] = if a == b { S::one() - scaled } else { -scaled };
        }
        ops.count_muldiv(m as u64);
        ops.count_addsub(1);
        rhs[(a, 0)] = S::one();
        rhs[(a, 1)] = instance.rewards()[i];
    }
    (lhs, rhs)
}

fn check_set<S: Scalar>(instance: &BanditInstance<S>, set: &[usize]) -> Result<()> {
    let n = instance.n_states();
    let mut seen = vec![false; n];
    for &i in set {
        if i >= n {
            return Err(Error::dims(format!(
                "state {} out of range for n = {n}",
                i + 1
            )));
        }
        if seen[i] {
            return Err(Error::dims(format!("state {} repeated in set", i + 1)));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Work and reward measures `g`, `f` of the `set`-active policy.
///
/// At discount 1 the sub-chain on `set` must be transient; a recurrent
/// sub-chain surfaces as [`Error::SingularMatrix`].
pub fn evaluate_policy<S: Scalar>(
    instance: &BanditInstance<S>,
    set: &[usize],
) -> Result<PolicyMeasures<S>> {
    let mut scratch = OpCounter::new();
    evaluate_policy_counted(instance, set, &mut scratch)
}

/// [`evaluate_policy`] with arithmetic tallied into `ops`.
pub fn evaluate_policy_counted<S: Scalar>(
    instance: &BanditInstance<S>,
    set: &[usize],
    ops: &mut OpCounter,
) -> Result<PolicyMeasures<S>> {
    check_set(instance, set)?;
    let n = instance.n_states();
    let mut work = vec![S::zero(); n];
    let mut reward = vec![S::zero(); n];
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    if !sorted.is_empty() {
        let (lhs, rhs) = continuation_system(instance, &sorted, ops);
        let x = solve_dense_counted(&lhs, &rhs, ops)?;
        for (a, &i) in sorted.iter().enumerate() {
            work[i] = x[(a, 0)];
            reward[i] = x[(a, 1)];
        }
    }
    Ok(PolicyMeasures {
        work,
        reward,
        set: sorted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Mat;
    use crate::model::BanditInstance;
    use approx::assert_abs_diff_eq;

    fn two_state() -> BanditInstance<f64> {
        BanditInstance::new(
            Mat::from_rows(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap(),
            vec![1.0, 0.0],
            0.5,
        )
        .unwrap()
    }

    #[test]
    fn identity_system_returns_rhs() {
        let a = Mat::<f64>::identity(3);
        let b = Mat::from_rows(vec![vec![1.0, 4.0], vec![2.0, 5.0], vec![3.0, 6.0]]).unwrap();
        let x = solve_dense(&a, &b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn solves_and_verifies_by_multiplying_back() {
        let a = Mat::from_rows(vec![vec![0.75, -0.25], vec![-0.25, 0.75]]).unwrap();
        let b = Mat::from_rows(vec![vec![1.0], vec![4.0]]).unwrap();
        let x = solve_dense(&a, &b).unwrap();
        assert_abs_diff_eq!(x[(0, 0)], 3.5, epsilon = 1e-12);
        assert_abs_diff_eq!(x[(1, 0)], 6.5, epsilon = 1e-12);
        // Independent check: A * x reproduces b.
        let back = a.mul_vec(&[x[(0, 0)], x[(1, 0)]]);
        assert_abs_diff_eq!(back[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(back[1], 4.0, epsilon = 1e-12);
    }

    #[test]
    fn rank_deficient_matrix_is_singular() {
        let a = Mat::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let b = Mat::from_rows(vec![vec![1.0], vec![2.0]]).unwrap();
        assert!(matches!(
            solve_dense(&a, &b),
            Err(Error::SingularMatrix { .. })
        ));
    }

    #[test]
    fn empty_continuation_set_is_all_zero() {
        let m = evaluate_policy(&two_state(), &[]).unwrap();
        assert_eq!(m.work, vec![0.0, 0.0]);
        assert_eq!(m.reward, vec![0.0, 0.0]);
    }

    #[test]
    fn singleton_set_solves_scalar_fixed_point() {
        // g_1 = 1 + 0.25 g_1  =>  g_1 = 4/3; same equation for f with R_1 = 1.
        let m = evaluate_policy(&two_state(), &[0]).unwrap();
        assert_abs_diff_eq!(m.work[0], 4.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.reward[0], 4.0 / 3.0, epsilon = 1e-12);
        assert_eq!(m.work[1], 0.0);
        assert_eq!(m.reward[1], 0.0);
    }

    #[test]
    fn full_set_solves_two_state_fixed_point() {
        let m = evaluate_policy(&two_state(), &[0, 1]).unwrap();
        assert_abs_diff_eq!(m.work[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.work[1], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.reward[0], 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(m.reward[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn recurrent_subchain_at_discount_one_is_singular() {
        let inst = BanditInstance::new(
            Mat::from_rows(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap(),
            vec![1.0, 0.0],
            1.0,
        )
        .unwrap();
        // State 0 is absorbing: {0} is recurrent, {1} is transient.
        assert!(matches!(
            evaluate_policy(&inst, &[0]),
            Err(Error::SingularMatrix { .. })
        ));
        let m = evaluate_policy(&inst, &[1]).unwrap();
        assert_abs_diff_eq!(m.work[1], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_out_of_range_and_duplicate_states() {
        let inst = two_state();
        assert!(evaluate_policy(&inst, &[2]).is_err());
        assert!(evaluate_policy(&inst, &[0, 0]).is_err());
    }
}
