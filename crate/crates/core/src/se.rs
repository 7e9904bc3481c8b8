//! State-elimination index computation.
//!
//! Works on the discounted transition matrix directly: each step removes
//! the selected state from the chain by conditioning on never revisiting
//! it, updating the remaining rows, the per-state discount mass
//! (remaining row sums), and the scaled rewards. Costs `n^3 + O(n^2)`
//! arithmetic operations. Discount 1 is rejected because the initial
//! scaled rewards `(1 - beta) R` degenerate.

use crate::counter::OpCounter;
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::model::{BanditInstance, IndexResult};
use crate::scalar::Scalar;

/// Threshold on `1 - p_kk` before eliminating state `k`.
pub const PIVOT_DEGENERACY_TOL: f64 = 1e-12;

/// Elimination state after a number of steps, for stepwise inspection.
/// Entries for already-eliminated states are stale and meaningless.
#[derive(Clone, Debug)]
pub struct SeSnapshot<S> {
    /// States eliminated so far, in order (`S_k`).
    pub selected: Vec<usize>,
    /// Current discounted transition matrix.
    pub trans: Mat<S>,
    /// Per-state remaining discount mass (row sums of `trans` over the
    /// states still present).
    pub mass: Vec<S>,
    /// Current scaled rewards.
    pub reward: Vec<S>,
}

fn compute<S: Scalar>(
    instance: &BanditInstance<S>,
    forced_order: Option<&[usize]>,
    mut observe: impl FnMut(&SeSnapshot<S>),
    snapshot_wanted: bool,
) -> Result<IndexResult<S>> {
    let beta = instance.discount();
    if instance.is_undiscounted() {
        return Err(Error::bad_discount(
            1.0,
            "state elimination only applies to discount < 1 (its initial \
             scaled rewards multiply by 1 - discount)",
        ));
    }
    let n = instance.n_states();
    let p = instance.transitions();
    let mut ops = OpCounter::new();

    let mut trans = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            trans[(i, j)] = beta * p[(i, j)];
        }
    }
    ops.count_muldiv((n * n) as u64);
    let mut mass = vec![beta; n];
    let one_minus_beta = S::one() - beta;
    ops.count_addsub(1);
    let mut reward: Vec<S> = instance
        .rewards()
        .iter()
        .map(|&x| one_minus_beta * x)
        .collect();
    ops.count_muldiv(n as u64);

    let mut values = vec![S::zero(); n];
    let mut order = Vec::with_capacity(n);
    let mut active: Vec<usize> = (0..n).collect();

    let snapshots_emit = |selected: &[usize],
                              trans: &Mat<S>,
                              mass: &[S],
                              reward: &[S],
                              observe: &mut dyn FnMut(&SeSnapshot<S>)| {
        observe(&SeSnapshot {
            selected: selected.to_vec(),
            trans: trans.clone(),
            mass: mass.to_vec(),
            reward: reward.to_vec(),
        });
    };
    if snapshot_wanted {
        snapshots_emit(&order, &trans, &mass, &reward, &mut observe);
    }

    for k in 1..=n {
        let mut best = usize::MAX;
        let mut best_ratio = S::neg_infinity();
        for &i in &active {
            let ratio = reward[i] / (S::one() - mass[i]);
            if best == usize::MAX || ratio > best_ratio {
                best = i;
                best_ratio = ratio;
            }
        }
        ops.count_muldiv(active.len() as u64);
        ops.count_addsub(active.len() as u64);
        if let Some(forced) = forced_order {
            best = forced[k - 1];
            best_ratio = reward[best] / (S::one() - mass[best]);
        }
        let pos = active
            .iter()
            .position(|&i| i == best)
            .ok_or_else(|| Error::dims(format!("state {} is not active", best + 1)))?;
        active.remove(pos);
        values[best] = best_ratio;
        order.push(best);

        if k < n {
            let denom = S::one() - trans[(best, best)];
            ops.count_addsub(1);
            if denom.abs() < S::from_f64(PIVOT_DEGENERACY_TOL) {
                return Err(Error::DegeneratePivot {
                    step: k,
                    value: denom.as_f64(),
                });
            }
            let factor = S::one() / denom;
            ops.count_muldiv(1);

            // Rescale the column into the eliminated state, then spread the
            // eliminated row over the remaining block.
            for &i in &active {
                trans[(i, best)] = trans[(i, best)] * factor;
            }
            ops.count_muldiv(active.len() as u64);
            let pivot_row: Vec<S> = trans.row(best).to_vec();
            for &i in &active {
                let via = trans[(i, best)];
                let row = trans.row_mut(i);
                for &j in &active {
                    row[j] = row[j] + via * pivot_row[j];
                }
            }
            let m = active.len() as u64;
            ops.count_muldiv(m * m);
            ops.count_addsub(m * m);

            // Remaining discount mass per state: row sums over the block.
            for &i in &active {
                let mut sum = S::zero();
                for &j in &active {
                    sum = sum + trans[(i, j)];
                }
                mass[i] = sum;
            }
            ops.count_addsub(m * m.saturating_sub(1));

            let r_pivot = reward[best];
            for &i in &active {
                reward[i] = reward[i] + r_pivot * trans[(i, best)];
            }
            ops.count_muldiv(m);
            ops.count_addsub(m);
        }

        if snapshot_wanted {
            snapshots_emit(&order, &trans, &mass, &reward, &mut observe);
        }
    }

    Ok(IndexResult {
        order,
        values,
        flops: ops,
    })
}

/// Computes all Gittins indices by state elimination.
pub fn se_compute<S: Scalar>(instance: &BanditInstance<S>) -> Result<IndexResult<S>> {
    compute(instance, None, |_| {}, false)
}

/// [`se_compute`] capturing a snapshot after initialization and after each
/// step: `snapshots[k]` reflects `S_k`. Memory is `O(n^3)`.
pub fn se_compute_traced<S: Scalar>(
    instance: &BanditInstance<S>,
) -> Result<(IndexResult<S>, Vec<SeSnapshot<S>>)> {
    let mut snapshots = Vec::new();
    let result = compute(instance, None, |s| snapshots.push(s.clone()), true)?;
    Ok((result, snapshots))
}

/// Traced run with an imposed selection order, for stepwise comparison
/// against other algorithms under identical continuation sets.
pub fn se_compute_traced_with_order<S: Scalar>(
    instance: &BanditInstance<S>,
    order: &[usize],
) -> Result<(IndexResult<S>, Vec<SeSnapshot<S>>)> {
    let mut snapshots = Vec::new();
    let result = compute(instance, Some(order), |s| snapshots.push(s.clone()), true)?;
    Ok((result, snapshots))
}
