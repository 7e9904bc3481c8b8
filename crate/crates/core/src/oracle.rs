//! Independent ground truths for the quantities the index algorithms
//! compute: exhaustive index values over all continuation sets, occupancy
//! measures, marginal work/reward measures from their defining linear
//! systems, the decomposition identities, the optimality-interval test,
//! and discount monotonicity.
//!
//! Everything here favors directness over speed and is meant for
//! cross-validation at small state counts.

use crate::error::{Error, Result};
use crate::fp::fp_compute;
use crate::linsolve::{evaluate_policy, solve_dense};
use crate::matrix::Mat;
use crate::model::{BanditInstance, IndexResult};
use crate::scalar::Scalar;

/// Largest state count accepted by the exhaustive enumeration.
pub const MAX_BRUTEFORCE_STATES: usize = 20;

/// Discounted state-action occupancies of a stationary rule, for a fixed
/// initial state.
#[derive(Clone, Debug)]
pub struct OccupancyMeasures<S> {
    /// Expected discounted time stopping in each state (supported off the
    /// continuation set).
    pub passive: Vec<S>,
    /// Expected discounted time continuing in each state (supported on the
    /// continuation set).
    pub active: Vec<S>,
    /// The continuation set, ascending.
    pub set: Vec<usize>,
    /// Initial state.
    pub start: usize,
}

/// Marginal work and reward measures of a continuation set, for all states.
#[derive(Clone, Debug)]
pub struct MarginalMeasures<S> {
    pub work: Vec<S>,
    pub reward: Vec<S>,
    /// Ratio `reward / work` per state (meaningful where `work > 0`).
    pub rate: Vec<S>,
}

fn require_discounted<S: Scalar>(instance: &BanditInstance<S>, what: &str) -> Result<()> {
    if instance.is_undiscounted() {
        return Err(Error::bad_discount(1.0, format!("{what} requires discount < 1")));
    }
    Ok(())
}

/// Exhaustive Gittins index of every state: maximizes the reward/work
/// ratio over all continuation sets containing the state.
///
/// At discount 1, sets with a recurrent sub-chain are skipped; if no
/// transient set contains some state the index is undefined here and an
/// error is returned.
pub fn gittins_bruteforce_all<S: Scalar>(instance: &BanditInstance<S>) -> Result<Vec<S>> {
    let n = instance.n_states();
    if n > MAX_BRUTEFORCE_STATES {
        return Err(Error::InstanceTooLarge {
            n,
            max: MAX_BRUTEFORCE_STATES,
        });
    }
    let undiscounted = instance.is_undiscounted();
    let floor = S::from_f64(1e-12);
    let mut best: Vec<Option<S>> = vec![None; n];
    let mut set = Vec::with_capacity(n);
    for mask in 1u32..(1u32 << n) {
        set.clear();
        for i in 0..n {
            if mask & (1 << i) != 0 {
                set.push(i);
            }
        }
        let measures = match evaluate_policy(instance, &set) {
            Ok(m) => m,
            Err(Error::SingularMatrix { .. }) if undiscounted => continue,
            Err(e) => return Err(e),
        };
        for &i in &set {
            if measures.work[i] > floor {
                let ratio = measures.reward[i] / measures.work[i];
                if best[i].is_none_or(|b| ratio > b) {
                    best[i] = Some(ratio);
                }
            }
        }
    }
    best.into_iter()
        .enumerate()
        .map(|(i, b)| {
            b.ok_or_else(|| {
                Error::bad_discount(
                    1.0,
                    format!(
                        "no transient continuation set contains state {}; the \
                         exhaustive index is undefined at discount 1",
                        i + 1
                    ),
                )
            })
        })
        .collect()
}

/// Exhaustive Gittins index of one state.
pub fn gittins_bruteforce<S: Scalar>(instance: &BanditInstance<S>, state: usize) -> Result<S> {
    if state >= instance.n_states() {
        return Err(Error::dims(format!(
            "state {} out of range for n = {}",
            state + 1,
            instance.n_states()
        )));
    }
    Ok(gittins_bruteforce_all(instance)?[state])
}

/// Occupancy measures of the `set`-active stationary rule started at
/// `start`, from the defining linear system.
pub fn occupancy_measures<S: Scalar>(
    instance: &BanditInstance<S>,
    set: &[usize],
    start: usize,
) -> Result<OccupancyMeasures<S>> {
    require_discounted(instance, "occupancy computation")?;
    let n = instance.n_states();
    if start >= n {
        return Err(Error::dims(format!(
            "initial state {} out of range for n = {n}",
            start + 1
        )));
    }
    let beta = instance.discount();
    let p = instance.transitions();
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != set.len() {
        return Err(Error::dims("continuation set has repeated states"));
    }
    if sorted.iter().any(|&i| i >= n) {
        return Err(Error::dims("continuation set state out of range"));
    }

    let mut active = vec![S::zero(); n];
    if let Some(pos) = sorted.iter().position(|&i| i == start) {
        // Row-vector system x (I_S - beta P_SS) = e_start, solved as the
        // transposed column system.
        let m = sorted.len();
        let mut lhs = Mat::zeros(m, m);
        for (a, &i) in sorted.iter().enumerate() {
            for (b, &j) in sorted.iter().enumerate() {
                let scaled = beta * p[(j, i)];
                lhs[(a, b)] = if a == b { S::one() - scaled } else { -scaled };
            }
        }
        let mut rhs = Mat::zeros(m, 1);
        rhs[(pos, 0)] = S::one();
        let x = solve_dense(&lhs, &rhs)?;
        for (a, &i) in sorted.iter().enumerate() {
            active[i] = x[(a, 0)];
        }
    }

    let inv = S::one() / (S::one() - beta);
    let mut passive = vec![S::zero(); n];
    let in_set: Vec<bool> = {
        let mut v = vec![false; n];
        for &i in &sorted {
            v[i] = true;
        }
        v
    };
    for j in 0..n {
        if in_set[j] {
            continue;
        }
        let mut inflow = S::zero();
        for &l in &sorted {
            inflow = inflow + active[l] * p[(l, j)];
        }
        let hit = if j == start { S::one() } else { S::zero() };
        passive[j] = (hit + beta * inflow) * inv;
    }

    Ok(OccupancyMeasures {
        passive,
        active,
        set: sorted,
        start,
    })
}

/// Max-norm residual of the defining balance equation
/// `(1-beta) x0 + x1 (I - beta P) = e_start`.
pub fn occupancy_residual<S: Scalar>(
    instance: &BanditInstance<S>,
    occ: &OccupancyMeasures<S>,
) -> S {
    let n = instance.n_states();
    let beta = instance.discount();
    let p = instance.transitions();
    let mut worst = S::zero();
    for j in 0..n {
        let mut flow = S::zero();
        for l in 0..n {
            flow = flow + occ.active[l] * p[(l, j)];
        }
        let lhs = (S::one() - beta) * occ.passive[j] + occ.active[j] - beta * flow;
        let rhs = if j == occ.start { S::one() } else { S::zero() };
        worst = worst.max((lhs - rhs).abs());
    }
    worst
}

/// Marginal work/reward measures of a continuation set from their defining
/// formulas (via one policy evaluation), for every state.
pub fn marginal_measures_direct<S: Scalar>(
    instance: &BanditInstance<S>,
    set: &[usize],
) -> Result<MarginalMeasures<S>> {
    let n = instance.n_states();
    let beta = instance.discount();
    let p = instance.transitions();
    let measures = evaluate_policy(instance, set)?;
    let one_minus_beta = S::one() - beta;
    let mut in_set = vec![false; n];
    for &i in &measures.set {
        in_set[i] = true;
    }
    let mut work = vec![S::zero(); n];
    let mut reward = vec![S::zero(); n];
    for i in 0..n {
        if in_set[i] {
            work[i] = one_minus_beta * measures.work[i];
            reward[i] = one_minus_beta * measures.reward[i];
        } else {
            let mut flow_w = S::zero();
            let mut flow_f = S::zero();
            for &j in &measures.set {
                flow_w = flow_w + p[(i, j)] * measures.work[j];
                flow_f = flow_f + p[(i, j)] * measures.reward[j];
            }
            work[i] = S::one() + beta * flow_w;
            reward[i] = instance.rewards()[i] + beta * flow_f;
        }
    }
    let rate = reward
        .iter()
        .zip(&work)
        .map(|(&r, &w)| r / w)
        .collect();
    Ok(MarginalMeasures { work, reward, rate })
}

/// Residuals of the three decomposition identities relating a stationary
/// rule's measures to a reference continuation set `set`:
/// (a) work, (b) reward, (c) reward minus work (the charge-1 objective).
///
/// The rule continues exactly on `rule_set`; `start` is the initial state.
pub fn decomposition_check<S: Scalar>(
    instance: &BanditInstance<S>,
    set: &[usize],
    rule_set: &[usize],
    start: usize,
) -> Result<[S; 3]> {
    require_discounted(instance, "the decomposition identities")?;
    let reference = evaluate_policy(instance, set)?;
    let marginals = marginal_measures_direct(instance, set)?;
    let rule = evaluate_policy(instance, rule_set)?;
    let occ = occupancy_measures(instance, rule_set, start)?;

    let n = instance.n_states();
    let mut in_set = vec![false; n];
    for &i in &reference.set {
        in_set[i] = true;
    }
    let correction = |weights: &[S]| {
        let mut acc = S::zero();
        for j in 0..n {
            if in_set[j] {
                acc = acc - weights[j] * occ.passive[j];
            } else {
                acc = acc + weights[j] * occ.active[j];
            }
        }
        acc
    };

    let work_rhs = reference.work[start] + correction(&marginals.work);
    let reward_rhs = reference.reward[start] + correction(&marginals.reward);
    let net_weights: Vec<S> = marginals
        .reward
        .iter()
        .zip(&marginals.work)
        .map(|(&r, &w)| r - w)
        .collect();
    let net_rhs =
        reference.reward[start] - reference.work[start] + correction(&net_weights);

    Ok([
        (rule.work[start] - work_rhs).abs(),
        (rule.reward[start] - reward_rhs).abs(),
        ((rule.reward[start] - rule.work[start]) - net_rhs).abs(),
    ])
}

/// Verifies along a computed selection order that every visited set is
/// optimal for some charge: the largest rate outside the set must not
/// exceed the smallest rate inside (within 1e-9).
pub fn optimality_interval_check<S: Scalar>(
    instance: &BanditInstance<S>,
    result: &IndexResult<S>,
) -> Result<bool> {
    require_discounted(instance, "the optimality-interval test")?;
    let n = instance.n_states();
    if n > 12 {
        return Err(Error::InstanceTooLarge { n, max: 12 });
    }
    let slack = S::from_f64(1e-9);
    for k in 0..=n {
        let set = &result.order[..k];
        let marginals = marginal_measures_direct(instance, set)?;
        let mut in_set = vec![false; n];
        for &i in set {
            in_set[i] = true;
        }
        let mut outside_max = S::neg_infinity();
        let mut inside_min = S::infinity();
        for (i, &inside) in in_set.iter().enumerate() {
            if inside {
                inside_min = inside_min.min(marginals.rate[i]);
            } else {
                outside_max = outside_max.max(marginals.rate[i]);
            }
        }
        if outside_max > inside_min + slack {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks that index values are componentwise nondecreasing from discount
/// `beta_lo` to `beta_hi` (within 1e-9 slack). Both discounts must lie in
/// `(0, 1)` and satisfy `beta_lo <= beta_hi`.
pub fn kelly_monotonicity_check<S: Scalar>(
    instance: &BanditInstance<S>,
    beta_lo: S,
    beta_hi: S,
) -> Result<bool> {
    for b in [beta_lo, beta_hi] {
        if !(b > S::zero() && b < S::one()) {
            return Err(Error::bad_discount(
                b.as_f64(),
                "monotonicity check requires discounts in (0, 1)",
            ));
        }
    }
    if beta_lo > beta_hi {
        return Err(Error::dims("discounts must be ordered low to high"));
    }
    let lo = fp_compute(&instance.with_discount(beta_lo)?, false)?;
    let hi = fp_compute(&instance.with_discount(beta_hi)?, false)?;
    let slack = S::from_f64(1e-9);
    Ok(lo
        .values
        .iter()
        .zip(&hi.values)
        .all(|(&a, &b)| a <= b + slack))
}
