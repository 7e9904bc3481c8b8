//! Property tests: algorithm-independent invariants on randomly generated
//! instances.

mod common;

use common::{instance_from_raw, max_rel_dev};
use gittins::model::{random_instance, GeneratorConfig, StoppingInstance};
use gittins::oracle::{
    gittins_bruteforce_all, marginal_measures_direct, occupancy_measures, occupancy_residual,
};
use gittins::stopping::{reduce_terminal_rewards, solve_optimal_stopping};
use gittins::{
    cp_compute, evaluate_policy, fp_compute, parse_instance, se_compute, vwb_compute,
    BanditInstance,
};
use proptest::prelude::*;

fn raw_instance(max_n: usize) -> impl Strategy<Value = BanditInstance<f64>> {
    (1..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec(prop::collection::vec(0.0f64..1.0, n), n),
            prop::collection::vec(-5.0f64..5.0, n),
            0.05f64..0.99,
        )
            .prop_map(|(rows, rewards, beta)| instance_from_raw(rows, rewards, beta))
    })
}

fn stopping_instance(max_n: usize) -> impl Strategy<Value = StoppingInstance<f64>> {
    raw_instance(max_n).prop_flat_map(|base| {
        let n = base.n_states();
        (
            Just(base),
            prop::collection::vec(-2.0f64..2.0, n),
            -1.0f64..1.5,
        )
            .prop_map(|(base, q, nu)| StoppingInstance::new(base, q, nu).unwrap())
    })
}

fn subset_of(n: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(prop::bool::ANY, n).prop_map(|mask| {
        mask.iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    /// All five algorithms and the exhaustive oracle agree, each output is a
    /// valid nonincreasing selection.
    #[test]
    fn algorithms_agree_with_each_other_and_the_oracle(inst in raw_instance(8)) {
        let outputs = [
            fp_compute(&inst, false).unwrap(),
            fp_compute(&inst, true).unwrap(),
            cp_compute(&inst).unwrap(),
            se_compute(&inst).unwrap(),
            vwb_compute(&inst).unwrap(),
        ];
        for out in &outputs {
            prop_assert!(out.is_consistent(1e-12));
        }
        for pair in outputs.windows(2) {
            prop_assert!(max_rel_dev(&pair[0].values, &pair[1].values) <= 1e-8);
        }
        let exhaustive = gittins_bruteforce_all(&inst).unwrap();
        prop_assert!(max_rel_dev(&outputs[0].values, &exhaustive) <= 1e-8);
    }

    /// Marginal workloads stay positive throughout a discounted run.
    #[test]
    fn workloads_stay_positive(inst in raw_instance(10)) {
        let (_, steps) = gittins::fp_compute_traced(&inst, false).unwrap();
        for step in &steps {
            for &i in &step.active {
                prop_assert!(step.workload[i] >= 1e-12);
            }
        }
    }

    /// The rate maintained by fast pivoting equals the defining ratio
    /// computed from scratch at every step, on and off the set as
    /// applicable.
    #[test]
    fn fp_rates_match_direct_marginal_measures(inst in raw_instance(6)) {
        for extended in [false, true] {
            let (_, steps) = gittins::fp_compute_traced(&inst, extended).unwrap();
            for step in &steps {
                let truth = marginal_measures_direct(&inst, &step.selected).unwrap();
                let tracked: Vec<usize> = if extended {
                    (0..inst.n_states()).collect()
                } else {
                    step.active.clone()
                };
                for &i in &tracked {
                    prop_assert!((step.workload[i] - truth.work[i]).abs() <= 1e-9);
                    prop_assert!((step.rate[i] - truth.rate[i]).abs() <= 1e-9);
                }
            }
        }
    }

    /// Policy evaluation satisfies its fixed-point equations, and the full
    /// continuation set yields the geometric series.
    #[test]
    fn policy_evaluation_fixed_point(inst in raw_instance(9), set in subset_of(9)) {
        let set: Vec<usize> = set.into_iter().filter(|&i| i < inst.n_states()).collect();
        let beta = inst.discount();
        let measures = evaluate_policy(&inst, &set).unwrap();
        for &i in &set {
            let mut w_flow = 0.0;
            let mut f_flow = 0.0;
            for &j in &set {
                w_flow += inst.transition(i, j) * measures.work[j];
                f_flow += inst.transition(i, j) * measures.reward[j];
            }
            prop_assert!((measures.work[i] - (1.0 + beta * w_flow)).abs() <= 1e-9);
            prop_assert!(
                (measures.reward[i] - (inst.rewards()[i] + beta * f_flow)).abs() <= 1e-9
            );
        }
        let full: Vec<usize> = (0..inst.n_states()).collect();
        let full_measures = evaluate_policy(&inst, &full).unwrap();
        for &g in &full_measures.work {
            prop_assert!((g - 1.0 / (1.0 - beta)).abs() <= 1e-8 / (1.0 - beta));
        }
    }

    /// Occupancies satisfy their balance equation and recover the policy
    /// measures.
    #[test]
    fn occupancies_balance_and_recover_measures(
        inst in raw_instance(7),
        set in subset_of(7),
        start_raw in 0usize..7,
    ) {
        let n = inst.n_states();
        let set: Vec<usize> = set.into_iter().filter(|&i| i < n).collect();
        let start = start_raw % n;
        let occ = occupancy_measures(&inst, &set, start).unwrap();
        prop_assert!(occupancy_residual(&inst, &occ) <= 1e-9);
        let measures = evaluate_policy(&inst, &set).unwrap();
        let g: f64 = occ.active.iter().sum();
        let f: f64 = occ
            .active
            .iter()
            .zip(inst.rewards())
            .map(|(&x, &r)| x * r)
            .sum();
        prop_assert!((g - measures.work[start]).abs() <= 1e-9);
        prop_assert!((f - measures.reward[start]).abs() <= 1e-9);
    }

    /// Folding terminal rewards into running rewards preserves the value of
    /// every stationary rule, computed from occupancies on both sides.
    #[test]
    fn terminal_reward_reduction_preserves_rule_values(
        inst in stopping_instance(7),
        rule in subset_of(7),
    ) {
        let base = inst.base();
        let n = base.n_states();
        let rule: Vec<usize> = rule.into_iter().filter(|&i| i < n).collect();
        let rhat = reduce_terminal_rewards(&inst);
        for start in 0..n {
            let occ = occupancy_measures(base, &rule, start).unwrap();
            let beta = base.discount();
            let with_terminal: f64 = occ
                .active
                .iter()
                .zip(base.rewards())
                .map(|(&x, &r)| x * r)
                .sum::<f64>()
                + (1.0 - beta)
                    * occ
                        .passive
                        .iter()
                        .zip(inst.terminal_rewards())
                        .map(|(&x, &q)| x * q)
                        .sum::<f64>();
            let reduced: f64 = occ
                .active
                .iter()
                .zip(&rhat)
                .map(|(&x, &r)| x * r)
                .sum();
            let q_start = inst.terminal_rewards()[start];
            prop_assert!((with_terminal - (q_start + reduced)).abs() <= 1e-9);
        }
    }

    /// The stopping set grows with the continuation charge.
    #[test]
    fn stop_set_is_monotone_in_the_charge(
        inst in stopping_instance(7),
        lo in -1.0f64..1.0,
        delta in 0.0f64..1.0,
    ) {
        let first = solve_optimal_stopping(&inst.with_charge(lo).unwrap()).unwrap();
        let second =
            solve_optimal_stopping(&inst.with_charge(lo + delta).unwrap()).unwrap();
        for s in &first.stop_set {
            prop_assert!(second.stop_set.contains(s));
        }
    }

    /// Generated instances round-trip through JSON bit-exactly.
    #[test]
    fn json_round_trip_is_bit_exact(n in 1usize..10, seed in 0u64..1000, beta in 0.05f64..1.0) {
        let config = GeneratorConfig { beta, ..GeneratorConfig::default() };
        let inst: BanditInstance<f64> = random_instance(n, &config, seed).unwrap();
        let raw = serde_json::json!({
            "n": inst.n_states(),
            "beta": inst.discount(),
            "P": (0..inst.n_states())
                .map(|i| inst.transitions().row(i).to_vec())
                .collect::<Vec<_>>(),
            "R": inst.rewards().to_vec(),
        });
        let parsed = parse_instance::<f64>(&raw.to_string()).unwrap();
        prop_assert_eq!(parsed.into_bandit(), inst);
    }
}

/// The single-precision lane computes the same small example.
#[test]
fn f32_lane_smoke_test() {
    let inst: BanditInstance<f32> = BanditInstance::new(
        gittins::Mat::from_rows(vec![vec![0.5f32, 0.5], vec![0.5, 0.5]]).unwrap(),
        vec![1.0, 0.0],
        0.5,
    )
    .unwrap();
    let out = fp_compute(&inst, false).unwrap();
    assert!((out.values[0] - 1.0).abs() < 1e-5);
    assert!((out.values[1] - 0.25).abs() < 1e-5);
}
