//! Instance data types, validation, and random generation.
//!
//! A [`BanditInstance`] is an `n`-state Markov chain with one reward per
//! state and a discount factor in `(0, 1]`. Instances are validated on
//! construction and immutable afterwards, so they can be shared read-only
//! across concurrent algorithm runs. States are 0-based in the API and
//! 1-based in files, reports, and error messages.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::counter::OpCounter;
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::scalar::{row_sum_tolerance, Scalar};

/// A finite-state bandit: transition matrix, per-state rewards, discount.
#[derive(Clone, Debug, PartialEq)]
pub struct BanditInstance<S> {
    n: usize,
    transitions: Mat<S>,
    rewards: Vec<S>,
    discount: S,
}

impl<S: Scalar> BanditInstance<S> {
    /// Validates and constructs an instance.
    ///
    /// Requirements: `transitions` is square and matches `rewards` in size,
    /// entries are nonnegative, every row sums to 1 within tolerance,
    /// rewards are finite, and the discount lies in `(0, 1]`. Rows are never
    /// renormalized; a violation is an error, not a repair.
    pub fn new(transitions: Mat<S>, rewards: Vec<S>, discount: S) -> Result<Self> {
        let n = rewards.len();
        if n == 0 {
            return Err(Error::dims("instance must have at least one state"));
        }
        if transitions.n_rows() != n || transitions.n_cols() != n {
            return Err(Error::dims(format!(
                "transition matrix is {}x{}, expected {n}x{n}",
                transitions.n_rows(),
                transitions.n_cols()
            )));
        }
        if !(discount > S::zero() && discount <= S::one()) || !discount.is_finite() {
            return Err(Error::bad_discount(
                discount.as_f64(),
                "must lie in (0, 1]",
            ));
        }
        let tol = row_sum_tolerance::<S>(n);
        for i in 0..n {
            let mut sum = S::zero();
            for j in 0..n {
                let p = transitions[(i, j)];
                if p < S::zero() || p.is_nan() {
                    return Err(Error::NegativeProbability {
                        row: i + 1,
                        col: j + 1,
                    });
                }
                sum = sum + p;
            }
            let deviation = (sum - S::one()).abs();
            if deviation > tol {
                return Err(Error::NonStochasticRow {
                    row: i + 1,
                    deviation: deviation.as_f64(),
                });
            }
        }
        for (i, r) in rewards.iter().enumerate() {
            if !r.is_finite() {
                return Err(Error::NonFiniteValue(format!("reward of state {}", i + 1)));
            }
        }
        Ok(Self {
            n,
            transitions,
            rewards,
            discount,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n
    }

    pub fn transitions(&self) -> &Mat<S> {
        &self.transitions
    }

    #[inline]
    pub fn transition(&self, from: usize, to: usize) -> S {
        self.transitions[(from, to)]
    }

    pub fn rewards(&self) -> &[S] {
        &self.rewards
    }

    pub fn discount(&self) -> S {
        self.discount
    }

    pub fn is_undiscounted(&self) -> bool {
        self.discount == S::one()
    }

    /// Same chain and rewards under a different discount factor.
    pub fn with_discount(&self, discount: S) -> Result<Self> {
        Self::new(self.transitions.clone(), self.rewards.clone(), discount)
    }

    /// Same chain and discount with the reward vector replaced.
    pub fn with_rewards(&self, rewards: Vec<S>) -> Result<Self> {
        Self::new(self.transitions.clone(), rewards, self.discount)
    }
}

/// Optimal-stopping problem data: a bandit plus terminal rewards and a
/// per-period continuation charge.
#[derive(Clone, Debug, PartialEq)]
pub struct StoppingInstance<S> {
    base: BanditInstance<S>,
    terminal: Vec<S>,
    charge: S,
}

impl<S: Scalar> StoppingInstance<S> {
    pub fn new(base: BanditInstance<S>, terminal: Vec<S>, charge: S) -> Result<Self> {
        if terminal.len() != base.n_states() {
            return Err(Error::dims(format!(
                "terminal rewards have length {}, expected {}",
                terminal.len(),
                base.n_states()
            )));
        }
        for (i, q) in terminal.iter().enumerate() {
            if !q.is_finite() {
                return Err(Error::NonFiniteValue(format!(
                    "terminal reward of state {}",
                    i + 1
                )));
            }
        }
        if !charge.is_finite() {
            return Err(Error::NonFiniteValue("continuation charge".into()));
        }
        Ok(Self {
            base,
            terminal,
            charge,
        })
    }

    pub fn base(&self) -> &BanditInstance<S> {
        &self.base
    }

    pub fn n_states(&self) -> usize {
        self.base.n_states()
    }

    pub fn terminal_rewards(&self) -> &[S] {
        &self.terminal
    }

    pub fn charge(&self) -> S {
        self.charge
    }

    /// Same data with a different continuation charge.
    pub fn with_charge(&self, charge: S) -> Result<Self> {
        Self::new(self.base.clone(), self.terminal.clone(), charge)
    }
}

/// Output of an index algorithm: the selection order, one index value per
/// state, and the arithmetic-operation tally of the run.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexResult<S> {
    /// States in selection order; index values are nonincreasing along it.
    pub order: Vec<usize>,
    /// Index value per state (0-based).
    pub values: Vec<S>,
    pub flops: OpCounter,
}

impl<S: Scalar> IndexResult<S> {
    /// Index values read off along the selection order.
    pub fn values_in_order(&self) -> Vec<S> {
        self.order.iter().map(|&i| self.values[i]).collect()
    }

    /// True when `order` is a permutation and values are nonincreasing
    /// along it, with `slack` absolute tolerance for round-off.
    pub fn is_consistent(&self, slack: S) -> bool {
        let n = self.values.len();
        let mut seen = vec![false; n];
        for &i in &self.order {
            if i >= n || seen[i] {
                return false;
            }
            seen[i] = true;
        }
        if self.order.len() != n {
            return false;
        }
        self.values_in_order()
            .windows(2)
            .all(|w| w[1] <= w[0] + slack)
    }
}

/// Parameters for [`random_instance`].
#[derive(Clone, Copy, Debug)]
pub struct GeneratorConfig {
    /// Fraction of nonzero entries per row, in `(0, 1]`.
    pub density: f64,
    /// Rewards are drawn uniformly from this closed interval.
    pub reward_min: f64,
    pub reward_max: f64,
    pub beta: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            density: 1.0,
            reward_min: 0.0,
            reward_max: 1.0,
            beta: 0.9,
        }
    }
}

/// Generates a random valid instance, deterministically in `seed`.
///
/// Per row, `max(1, round(density * n))` distinct column positions are
/// chosen uniformly, filled with independent uniform(0, 1) draws, and the
/// row is normalized to sum to 1 in working precision. Rewards are drawn
/// uniformly from the reward interval.
pub fn random_instance<S: Scalar>(
    n: usize,
    config: &GeneratorConfig,
    seed: u64,
) -> Result<BanditInstance<S>> {
    if n == 0 {
        return Err(Error::dims("state count must be positive"));
    }
    if !(config.density > 0.0 && config.density <= 1.0) {
        return Err(Error::dims(format!(
            "density {} must lie in (0, 1]",
            config.density
        )));
    }
    if config.reward_min > config.reward_max
        || !config.reward_min.is_finite()
        || !config.reward_max.is_finite()
    {
        return Err(Error::NonFiniteValue(format!(
            "reward range [{}, {}]",
            config.reward_min, config.reward_max
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_row = ((config.density * n as f64).round() as usize).clamp(1, n);

    let mut transitions = Mat::<S>::zeros(n, n);
    for i in 0..n {
        let cols = rand::seq::index::sample(&mut rng, n, per_row);
        let mut sum = 0.0f64;
        let mut draws = vec![0.0f64; per_row];
        // uniform(0,1) can return exactly 0; redraw rows with no mass.
        while sum <= 0.0 {
            for d in draws.iter_mut() {
                *d = rng.gen::<f64>();
            }
            sum = draws.iter().sum();
        }
        for (slot, j) in cols.iter().enumerate() {
            transitions[(i, j)] = S::from_f64(draws[slot]);
        }
        let mut row_sum = S::zero();
        for &v in transitions.row(i) {
            row_sum = row_sum + v;
        }
        for v in transitions.row_mut(i) {
            *v = *v / row_sum;
        }
    }

    let span = config.reward_max - config.reward_min;
    let rewards = (0..n)
        .map(|_| S::from_f64(config.reward_min + rng.gen::<f64>() * span))
        .collect();

    BanditInstance::new(transitions, rewards, S::from_f64(config.beta))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state() -> BanditInstance<f64> {
        BanditInstance::new(
            Mat::from_rows(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap(),
            vec![1.0, 0.0],
            0.5,
        )
        .unwrap()
    }

    #[test]
    fn accepts_single_absorbing_state() {
        let inst = BanditInstance::new(
            Mat::from_rows(vec![vec![1.0]]).unwrap(),
            vec![7.0],
            0.9,
        )
        .unwrap();
        assert_eq!(inst.n_states(), 1);
    }

    #[test]
    fn accepts_valid_two_state() {
        assert_eq!(two_state().n_states(), 2);
    }

    #[test]
    fn rejects_non_stochastic_row() {
        let err = BanditInstance::new(
            Mat::from_rows(vec![vec![0.6, 0.5], vec![0.5, 0.5]]).unwrap(),
            vec![1.0, 0.0],
            0.5,
        )
        .unwrap_err();
        match err {
            Error::NonStochasticRow { row, deviation } => {
                assert_eq!(row, 1);
                assert!((deviation - 0.1).abs() < 1e-12);
            }
            other => panic!("unexpected error: {other:?}"),
        }
    }

    #[test]
    fn rejects_negative_probability_and_bad_discount() {
        let p = Mat::from_rows(vec![vec![1.5, -0.5], vec![0.5, 0.5]]).unwrap();
        let err = BanditInstance::new(p, vec![0.0, 0.0], 0.5).unwrap_err();
        assert!(matches!(
            err,
            Error::NegativeProbability { row: 1, col: 2 }
        ));

        let p = Mat::from_rows(vec![vec![1.0]]).unwrap();
        for beta in [0.0, -0.1, 1.0 + 1e-9, f64::NAN] {
            let err = BanditInstance::new(p.clone(), vec![0.0], beta).unwrap_err();
            assert!(matches!(err, Error::BadDiscount { .. }));
        }
        assert!(BanditInstance::new(p, vec![0.0], 1.0).is_ok());
    }

    #[test]
    fn generator_is_deterministic_per_seed() {
        let cfg = GeneratorConfig::default();
        let a: BanditInstance<f64> = random_instance(5, &cfg, 42).unwrap();
        let b: BanditInstance<f64> = random_instance(5, &cfg, 42).unwrap();
        assert_eq!(a, b);
        let c: BanditInstance<f64> = random_instance(5, &cfg, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn sparse_generator_output_validates() {
        let cfg = GeneratorConfig {
            density: 0.1,
            ..GeneratorConfig::default()
        };
        let inst: BanditInstance<f64> = random_instance(200, &cfg, 1).unwrap();
        assert_eq!(inst.n_states(), 200);
        // Re-validating the parts exercises the row-sum check on the
        // normalized rows.
        BanditInstance::new(
            inst.transitions().clone(),
            inst.rewards().to_vec(),
            inst.discount(),
        )
        .unwrap();
    }

    #[test]
    fn degenerate_reward_range_is_constant() {
        let cfg = GeneratorConfig {
            reward_min: 5.0,
            reward_max: 5.0,
            beta: 0.5,
            ..GeneratorConfig::default()
        };
        let inst: BanditInstance<f64> = random_instance(3, &cfg, 7).unwrap();
        assert!(inst.rewards().iter().all(|&r| r == 5.0));
    }

    #[test]
    fn stopping_instance_validates_terminal_data() {
        let base = two_state();
        let err = StoppingInstance::new(base.clone(), vec![0.0], 0.0).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
        let err =
            StoppingInstance::new(base.clone(), vec![0.0, f64::INFINITY], 0.0).unwrap_err();
        assert!(matches!(err, Error::NonFiniteValue(_)));
        let err = StoppingInstance::new(base.clone(), vec![0.0, 0.0], f64::NAN).unwrap_err();
        assert!(matches!(err, Error::NonFiniteValue(_)));
        assert!(StoppingInstance::new(base, vec![2.0, 4.0], 0.5).is_ok());
    }

    #[test]
    fn index_result_consistency() {
        let ok = IndexResult {
            order: vec![1, 0],
            values: vec![0.25, 1.0],
            flops: OpCounter::default(),
        };
        assert!(ok.is_consistent(1e-12));
        let bad = IndexResult {
            order: vec![0, 1],
            values: vec![0.25, 1.0],
            flops: OpCounter::default(),
        };
        assert!(!bad.is_consistent(1e-12));
    }
}
