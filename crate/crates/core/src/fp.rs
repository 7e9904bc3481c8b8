//! Fast-pivoting Gittins-index computation.
//!
//! Computes all `n` index values in `(2/3) n^3 + O(n^2)` arithmetic
//! operations by maintaining only a reduced tableau: the coefficient block
//! rows for states still outside the continuation set, the marginal
//! workloads `w`, and the marginal productivity rates `nu`. Each step moves
//! the best remaining state into the continuation set and applies a
//! rank-one update to the retained block:
//!
//! ```text
//! alpha = -beta / (1 - beta (p_kk - A_{k,S} P_{S,k}))
//! A_{i,k}' = alpha (p_ik - A_{i,S} P_{S,k})          i outside
//! A_{i,S}' = A_{i,S} - A_{i,k}' A_{k,S}              i outside
//! w_i'     = w_i - w_k A_{i,k}'                      i outside
//! nu_i'    = nu_k - (w_i / w_i') (nu_k - nu_i)       i outside
//! ```
//!
//! With `extended = true` the symmetric upper blocks and the workloads and
//! rates of already-selected states are maintained as well (doubling the
//! cost to `(4/3) n^3`), which downstream consumers such as switching-index
//! methods need. The plain variant also computes the undiscounted index by
//! simply running with discount 1; the extended variant rejects discount 1
//! because its workload rescaling multiplies by `1 - beta`.

use crate::counter::OpCounter;
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::model::{BanditInstance, IndexResult};
use crate::scalar::Scalar;

/// Absolute threshold on the pivot denominator; a smaller magnitude at
/// discount 1 signals a recurrent class inside the continuation set.
pub const PIVOT_DEGENERACY_TOL: f64 = 1e-12;

/// The fast-pivoting working set.
///
/// Selected-set columns are stored compacted in selection order so that the
/// per-step update of the retained `(n-k) x k` block runs over contiguous
/// row slices: `low[(i, c)]` holds the coefficient of (state `i`, `c`-th
/// selected state). Extended mode additionally maintains the blocks for
/// already-selected states, transposed the same way: `upt[(j, c)]` holds
/// the coefficient of (`c`-th selected state, state `j`).
#[derive(Clone, Debug)]
pub struct ReducedTableau<S> {
    low: Mat<S>,
    upt: Mat<S>,
    workload: Vec<S>,
    rate: Vec<S>,
    selected: Vec<usize>,
    active: Vec<usize>,
    extended: bool,
    pivot_scale: S,
    ops: OpCounter,
}

impl<S: Scalar> ReducedTableau<S> {
    /// Initial tableau: `w = 1`, `nu = R`, empty continuation set.
    pub fn new(instance: &BanditInstance<S>, extended: bool) -> Result<Self> {
        if extended && instance.is_undiscounted() {
            return Err(Error::bad_discount(
                1.0,
                "extended output is undefined at discount 1 (its workload \
                 rescaling multiplies by 1 - discount)",
            ));
        }
        let n = instance.n_states();
        Ok(Self {
            low: Mat::zeros(n, n),
            upt: if extended {
                Mat::zeros(n, n)
            } else {
                Mat::zeros(0, 0)
            },
            workload: vec![S::one(); n],
            rate: instance.rewards().to_vec(),
            selected: Vec::with_capacity(n),
            active: (0..n).collect(),
            extended,
            pivot_scale: S::zero(),
            ops: OpCounter::new(),
        })
    }

    /// Completed steps so far (`k`).
    pub fn step(&self) -> usize {
        self.selected.len()
    }

    /// States already in the continuation set, in selection order.
    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    /// States not yet selected, ascending.
    pub fn active(&self) -> &[usize] {
        &self.active
    }

    /// Current marginal workloads `w` (meaningful on active states; on all
    /// states in extended mode).
    pub fn workload(&self) -> &[S] {
        &self.workload
    }

    /// Current marginal productivity rates `nu` (same domain as
    /// [`Self::workload`]).
    pub fn rate(&self) -> &[S] {
        &self.rate
    }

    /// Entry of the coefficient block for (`row` state, `col` state), or
    /// `None` where the reduced tableau holds no value. Rows outside the
    /// set against columns inside are always held; the reverse blocks only
    /// in extended mode.
    pub fn coefficient(&self, row: usize, col: usize) -> Option<S> {
        let col_pos = self.selected.iter().position(|&s| s == col);
        let row_pos = self.selected.iter().position(|&s| s == row);
        match (row_pos, col_pos) {
            (None, Some(c)) => Some(self.low[(row, c)]),
            (Some(r), None) if self.extended => Some(self.upt[(col, r)]),
            _ => None,
        }
    }

    /// Materializes the held blocks as a dense matrix indexed by original
    /// state numbers (absent entries zero).
    pub fn dense_tableau(&self) -> Mat<S> {
        let n = self.workload.len();
        let mut out = Mat::zeros(n, n);
        for &i in &self.active {
            for (c, &j) in self.selected.iter().enumerate() {
                out[(i, j)] = self.low[(i, c)];
            }
        }
        if self.extended {
            for (c, &j) in self.selected.iter().enumerate() {
                for &i in &self.active {
                    out[(j, i)] = self.upt[(i, c)];
                }
            }
        }
        out
    }

    /// Most recent pivot scalar `alpha`.
    pub fn pivot_scale(&self) -> S {
        self.pivot_scale
    }

    pub fn ops(&self) -> OpCounter {
        self.ops
    }

    /// Rate-maximizing active state, ties broken by smallest state number.
    pub fn best_active(&self) -> Option<usize> {
        // `active` is ascending, so strict improvement keeps the smallest.
        let mut it = self.active.iter().copied();
        let first = it.next()?;
        let mut best = first;
        for i in it {
            if self.rate[i] > self.rate[best] {
                best = i;
            }
        }
        Some(best)
    }

    /// Moves `state` into the continuation set, updating the retained
    /// blocks, workloads, and rates. Returns the state's index value.
    pub fn pivot_step(&mut self, instance: &BanditInstance<S>, state: usize) -> Result<S> {
        let pos = self
            .active
            .iter()
            .position(|&i| i == state)
            .ok_or_else(|| Error::dims(format!("state {} is not active", state + 1)))?;
        let n = instance.n_states();
        let beta = instance.discount();
        let p = instance.transitions();
        let index_value = self.rate[state];

        self.active.remove(pos);
        self.selected.push(state);
        let k = self.selected.len();
        let kk = k - 1;
        let prev = &self.selected[..kk];

        // Column of the new selected state in the extended upper block,
        // needed again for the selected-state workload updates below.
        let mut upper_pivot_col: Vec<S> = Vec::new();

        // The final step needs no pivot unless the extended blocks (and the
        // selected-state workload below) are being maintained.
        let run_pivot = k < n || self.extended;
        if run_pivot {
            // Transition probabilities from/into the selected states, in
            // selection order (gathers are copies, not arithmetic).
            let p_into: Vec<S> = prev.iter().map(|&j| p[(j, state)]).collect();

            // Pivot scalar.
            let mut inner = p[(state, state)];
            if kk > 0 {
                let mut dot = S::zero();
                for (a, &pj) in self.low.row(state)[..kk].iter().zip(&p_into) {
                    dot = dot + *a * pj;
                }
                self.ops.count_dot(kk);
                inner = inner - dot;
                self.ops.count_addsub(1);
            }
            let denom = S::one() - beta * inner;
            self.ops.count_muldiv(1);
            self.ops.count_addsub(1);
            if denom.abs() < S::from_f64(PIVOT_DEGENERACY_TOL) {
                return Err(Error::DegeneratePivot {
                    step: k,
                    value: denom.as_f64(),
                });
            }
            let alpha = -beta / denom;
            self.ops.count_muldiv(1);
            self.pivot_scale = alpha;

            // New column and rank-one update of the retained lower block;
            // each active row touches only its first k entries.
            let pivot_row: Vec<S> = self.low.row(state)[..kk].to_vec();
            for &i in &self.active {
                let p_entry = p[(i, state)];
                let row = self.low.row_mut(i);
                let col = if kk == 0 {
                    alpha * p_entry
                } else {
                    let mut dot = S::zero();
                    for (a, &pj) in row[..kk].iter().zip(&p_into) {
                        dot = dot + *a * pj;
                    }
                    alpha * (p_entry - dot)
                };
                for (a, &h) in row[..kk].iter_mut().zip(&pivot_row) {
                    *a = *a - col * h;
                }
                row[kk] = col;
            }
            // Per row: a length-k' dot, one subtraction, one scaling, and a
            // k'-term rank-one update, k' = |prev|.
            let m = self.active.len() as u64;
            self.ops.count_muldiv(m * (2 * kk as u64 + 1));
            self.ops.count_addsub(m * 2 * kk as u64);

            // Upper blocks, maintained only for extended output.
            if self.extended {
                let p_from: Vec<S> = prev.iter().map(|&j| p[(state, j)]).collect();
                upper_pivot_col = self.upt.row(state)[..kk].to_vec();
                for &j in &self.active {
                    let p_entry = p[(state, j)];
                    let row = self.upt.row_mut(j);
                    let val = if kk == 0 {
                        -alpha * p_entry
                    } else {
                        let mut dot = S::zero();
                        for (a, &pj) in row[..kk].iter().zip(&p_from) {
                            dot = dot + *a * pj;
                        }
                        -alpha * (p_entry + dot)
                    };
                    for (a, &coef) in row[..kk].iter_mut().zip(&upper_pivot_col) {
                        *a = *a + coef * val;
                    }
                    row[kk] = val;
                }
                self.ops.count_muldiv(m * (2 * kk as u64 + 1));
                self.ops.count_addsub(m * 2 * kk as u64);
            }
        }

        // Workload and rate updates for the remaining active states.
        let w_pivot = self.workload[state];
        for &i in &self.active {
            let w_old = self.workload[i];
            let w_new = w_old - w_pivot * self.low[(i, kk)];
            self.workload[i] = w_new;
            self.rate[i] = index_value - (w_old / w_new) * (index_value - self.rate[i]);
        }
        let m = self.active.len() as u64;
        self.ops.count_muldiv(3 * m);
        self.ops.count_addsub(3 * m);

        // Extended output also tracks the selected states.
        if self.extended {
            let alpha = self.pivot_scale;
            self.workload[state] = -(alpha * (S::one() - beta) / beta) * w_pivot;
            self.ops.count_muldiv(3);
            self.ops.count_addsub(1);
            let w_new_pivot = self.workload[state];
            for (c, &j) in prev.iter().enumerate() {
                let w_old = self.workload[j];
                let w_new = w_old + w_new_pivot * upper_pivot_col[c];
                self.workload[j] = w_new;
                self.rate[j] = index_value - (w_old / w_new) * (index_value - self.rate[j]);
            }
            self.ops.count_muldiv(3 * kk as u64);
            self.ops.count_addsub(3 * kk as u64);
            self.rate[state] = index_value;
        }

        Ok(index_value)
    }
}

/// One recorded step of a fast-pivoting run.
#[derive(Clone, Debug)]
pub struct FpStep<S> {
    /// 1-based step number `k`.
    pub step: usize,
    /// State selected at this step.
    pub chosen: usize,
    /// Its Gittins index value.
    pub index_value: S,
    /// Continuation set after this step, in selection order.
    pub selected: Vec<usize>,
    /// Remaining states, ascending.
    pub active: Vec<usize>,
    /// Marginal workloads after this step (meaningful on `active`, and on
    /// all states in extended mode).
    pub workload: Vec<S>,
    /// Marginal productivity rates after this step (same domain).
    pub rate: Vec<S>,
}

/// Per-step output of the extended variant: workloads, rates, and tableau
/// blocks for every continuation set the algorithm visits.
#[derive(Clone, Debug)]
pub struct ExtendedRecord<S> {
    pub steps: Vec<FpStep<S>>,
    /// Tableau snapshot per step, defined on `(active x selected)` and
    /// `(selected x active)`.
    pub tableaus: Vec<Mat<S>>,
}

fn compute<S: Scalar>(
    instance: &BanditInstance<S>,
    extended: bool,
    mut observe: impl FnMut(&ReducedTableau<S>, usize, S),
) -> Result<IndexResult<S>> {
    let n = instance.n_states();
    let mut tab = ReducedTableau::new(instance, extended)?;
    let mut values = vec![S::zero(); n];
    let mut order = Vec::with_capacity(n);
    while let Some(state) = tab.best_active() {
        let value = tab.pivot_step(instance, state)?;
        values[state] = value;
        order.push(state);
        observe(&tab, state, value);
    }
    Ok(IndexResult {
        order,
        values,
        flops: tab.ops(),
    })
}

/// Computes all Gittins indices by fast pivoting.
///
/// `extended = false` is the `(2/3) n^3` variant and accepts any discount
/// in `(0, 1]`; `extended = true` performs the `(4/3) n^3` bookkeeping of
/// the extended variant (rejecting discount 1) without materializing the
/// per-step record — use [`fp_compute_recorded`] for that.
pub fn fp_compute<S: Scalar>(
    instance: &BanditInstance<S>,
    extended: bool,
) -> Result<IndexResult<S>> {
    compute(instance, extended, |_, _, _| {})
}

/// Extended run that materializes the per-step record. Memory is
/// `O(n^3)`; intended for moderate `n` and downstream consumers.
pub fn fp_compute_recorded<S: Scalar>(
    instance: &BanditInstance<S>,
) -> Result<(IndexResult<S>, ExtendedRecord<S>)> {
    let mut record = ExtendedRecord {
        steps: Vec::new(),
        tableaus: Vec::new(),
    };
    let result = compute(instance, true, |tab, chosen, value| {
        record.steps.push(FpStep {
            step: tab.step(),
            chosen,
            index_value: value,
            selected: tab.selected().to_vec(),
            active: tab.active().to_vec(),
            workload: tab.workload().to_vec(),
            rate: tab.rate().to_vec(),
        });
        record.tableaus.push(tab.dense_tableau());
    })?;
    Ok((result, record))
}

/// Runs either variant while capturing workloads and rates after every
/// step, for stepwise verification against ground truth.
pub fn fp_compute_traced<S: Scalar>(
    instance: &BanditInstance<S>,
    extended: bool,
) -> Result<(IndexResult<S>, Vec<FpStep<S>>)> {
    let mut steps = Vec::new();
    let result = compute(instance, extended, |tab, chosen, value| {
        steps.push(FpStep {
            step: tab.step(),
            chosen,
            index_value: value,
            selected: tab.selected().to_vec(),
            active: tab.active().to_vec(),
            workload: tab.workload().to_vec(),
            rate: tab.rate().to_vec(),
        });
    })?;
    Ok((result, steps))
}
