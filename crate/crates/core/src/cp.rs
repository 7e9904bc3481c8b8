//! Conventional-pivoting index computation.
//!
//! The parametric-simplex reference algorithm: it carries the full `n x n`
//! tableau `A` plus marginal workload and reward vectors `w`, `r`, and
//! performs a complete rank-one pivot per step, for `2 n^3 + O(n^2)`
//! arithmetic operations overall. Discount 1 is rejected because the
//! initial tableau `A = (I - beta P) / (1 - beta)` divides by `1 - beta`.

use crate::counter::OpCounter;
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::model::{BanditInstance, IndexResult};
use crate::scalar::Scalar;

/// Threshold on the pivot element magnitude.
pub const PIVOT_DEGENERACY_TOL: f64 = 1e-12;

/// Tableau state after a number of pivot steps, for stepwise inspection.
#[derive(Clone, Debug)]
pub struct CpSnapshot<S> {
    /// States selected so far, in order (`S_k`).
    pub selected: Vec<usize>,
    /// Full tableau `A` after the step.
    pub tableau: Mat<S>,
    /// Marginal workloads `w` over all states.
    pub workload: Vec<S>,
    /// Marginal rewards `r` over all states.
    pub reward: Vec<S>,
}

fn compute<S: Scalar>(
    instance: &BanditInstance<S>,
    forced_order: Option<&[usize]>,
    mut observe: impl FnMut(&CpSnapshot<S>),
    snapshot_wanted: bool,
) -> Result<IndexResult<S>> {
    let beta = instance.discount();
    if instance.is_undiscounted() {
        return Err(Error::bad_discount(
            1.0,
            "conventional pivoting only applies to discount < 1 (its initial \
             tableau divides by 1 - discount)",
        ));
    }
    let n = instance.n_states();
    let p = instance.transitions();
    let mut ops = OpCounter::new();

    // A = (I - beta P) / (1 - beta), w = 1, r = R.
    let inv = S::one() / (S::one() - beta);
    ops.count_muldiv(1);
    ops.count_addsub(1);
    let mut a = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let scaled = beta * p[(i, j)];
            a[(i, j)] = if i == j {
                (S::one() - scaled) * inv
            } else {
                -(scaled * inv)
            };
        }
        ops.count_muldiv(2 * n as u64);
        ops.count_addsub(1);
    }
    let mut w = vec![S::one(); n];
    let mut r = instance.rewards().to_vec();

    let mut values = vec![S::zero(); n];
    let mut order = Vec::with_capacity(n);
    let mut active: Vec<usize> = (0..n).collect();
    let snap = |selected: &[usize], a: &Mat<S>, w: &[S], r: &[S],
                    observe: &mut dyn FnMut(&CpSnapshot<S>)| {
        observe(&CpSnapshot {
            selected: selected.to_vec(),
            tableau: a.clone(),
            workload: w.to_vec(),
            reward: r.to_vec(),
        });
    };
    if snapshot_wanted {
        snap(&order, &a, &w, &r, &mut observe);
    }

    for k in 1..=n {
        // Ratios r_i / w_i over the remaining states are arithmetic and
        // counted; the argmax scan is not.
        let mut best = usize::MAX;
        let mut best_ratio = S::neg_infinity();
        for &i in &active {
            let ratio = r[i] / w[i];
            if best == usize::MAX || ratio > best_ratio {
                best = i;
                best_ratio = ratio;
            }
        }
        ops.count_muldiv(active.len() as u64);
        if let Some(forced) = forced_order {
            best = forced[k - 1];
            best_ratio = r[best] / w[best];
        }
        let pos = active
            .iter()
            .position(|&i| i == best)
            .ok_or_else(|| Error::dims(format!("state {} is not active", best + 1)))?;
        active.remove(pos);
        values[best] = best_ratio;
        order.push(best);

        if k < n {
            let pivot = a[(best, best)];
            if pivot.abs() < S::from_f64(PIVOT_DEGENERACY_TOL) {
                return Err(Error::DegeneratePivot {
                    step: k,
                    value: pivot.as_f64(),
                });
            }
            a[(best, best)] = S::one();
            let col: Vec<S> = (0..n).map(|i| a[(i, best)] / pivot).collect();
            ops.count_muldiv(n as u64);
            let neg_row: Vec<S> = a.row(best).iter().map(|&x| -x).collect();

            for (i, &vi) in col.iter().enumerate() {
                let row = a.row_mut(i);
                for (cell, &h) in row.iter_mut().zip(&neg_row) {
                    *cell = *cell + vi * h;
                }
            }
            ops.count_muldiv((n * n) as u64);
            ops.count_addsub((n * n) as u64);
            for (i, &v) in col.iter().enumerate() {
                a[(i, best)] = v;
            }
            for j in 0..n {
                a[(best, j)] = neg_row[j] / pivot;
            }
            ops.count_muldiv(n as u64);

            // Marginal workload and reward updates on both sides of the set.
            let w_pivot = w[best];
            let r_pivot = r[best];
            for &i in &active {
                w[i] = w[i] - w_pivot * a[(i, best)];
                r[i] = r[i] - r_pivot * a[(i, best)];
            }
            for &j in order[..k - 1].iter() {
                w[j] = w[j] + w_pivot * a[(j, best)];
                r[j] = r[j] + r_pivot * a[(j, best)];
            }
            w[best] = w_pivot / pivot;
            r[best] = r_pivot / pivot;
            ops.count_muldiv(2 * (n as u64 - 1) + 2);
            ops.count_addsub(2 * (n as u64 - 1));
        }

        if snapshot_wanted {
            snap(&order, &a, &w, &r, &mut observe);
        }
    }

    Ok(IndexResult {
        order,
        values,
        flops: ops,
    })
}

/// Computes all Gittins indices by conventional pivoting.
pub fn cp_compute<S: Scalar>(instance: &BanditInstance<S>) -> Result<IndexResult<S>> {
    compute(instance, None, |_| {}, false)
}

/// [`cp_compute`] capturing a snapshot after initialization and after each
/// step: `snapshots[k]` reflects `S_k`. Memory is `O(n^3)`.
pub fn cp_compute_traced<S: Scalar>(
    instance: &BanditInstance<S>,
) -> Result<(IndexResult<S>, Vec<CpSnapshot<S>>)> {
    let mut snapshots = Vec::new();
    let result = compute(instance, None, |s| snapshots.push(s.clone()), true)?;
    Ok((result, snapshots))
}

/// Traced run with an imposed selection order (for stepwise comparison
/// against other algorithms under identical continuation sets).
pub fn cp_compute_traced_with_order<S: Scalar>(
    instance: &BanditInstance<S>,
    order: &[usize],
) -> Result<(IndexResult<S>, Vec<CpSnapshot<S>>)> {
    let mut snapshots = Vec::new();
    let result = compute(instance, Some(order), |s| snapshots.push(s.clone()), true)?;
    Ok((result, snapshots))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn instance(p: Vec<Vec<f64>>, r: Vec<f64>, beta: f64) -> BanditInstance<f64> {
        BanditInstance::new(Mat::from_rows(p).unwrap(), r, beta).unwrap()
    }

    fn two_state() -> BanditInstance<f64> {
        instance(vec![vec![0.5, 0.5], vec![0.5, 0.5]], vec![1.0, 0.0], 0.5)
    }

    #[test]
    fn initial_tableau_matches_hand_value() {
        let (_, snaps) = cp_compute_traced(&two_state()).unwrap();
        let a0 = &snaps[0].tableau;
        assert_abs_diff_eq!(a0[(0, 0)], 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(a0[(0, 1)], -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(a0[(1, 0)], -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(a0[(1, 1)], 1.5, epsilon = 1e-15);
        assert_eq!(snaps[0].workload, vec![1.0, 1.0]);
        assert_eq!(snaps[0].reward, vec![1.0, 0.0]);
    }

    #[test]
    fn two_state_indices() {
        let out = cp_compute(&two_state()).unwrap();
        assert_eq!(out.order, vec![0, 1]);
        assert_abs_diff_eq!(out.values[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.values[1], 0.25, epsilon = 1e-15);
    }

    #[test]
    fn single_state_index_is_its_reward() {
        let inst = instance(vec![vec![1.0]], vec![7.0], 0.9);
        assert_eq!(cp_compute(&inst).unwrap().values, vec![7.0]);
    }

    #[test]
    fn rejects_discount_one() {
        let inst = instance(vec![vec![1.0]], vec![7.0], 1.0);
        assert!(matches!(cp_compute(&inst), Err(Error::BadDiscount { .. })));
    }
}
