//! Decision matrices and a head-count oracle for the voting properties.
#![allow(dead_code)]

use std::collections::BTreeMap;

use ontoqual_core::regress::{naive_majority, weighted_vote, Decision, DecisionMatrix, Verdict};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

pub fn matrix_and_weights() -> impl Strategy<Value = (DecisionMatrix, Vec<f64>)> {
    (1usize..12, 1usize..10).prop_flat_map(|(validators, items)| {
        let decision = prop_oneof![Just(Decision::Accept), Just(Decision::Reject), Just(Decision::Abstain)];
        (
            prop::collection::vec(prop::collection::vec(decision, items), validators),
            prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..1.0, Just(0.5)], validators),
        )
            .prop_map(move |(rows, weights)| {
                let items: Vec<String> = (0..items).map(|i| format!("i{i}")).collect();
                let decisions = rows
                    .into_iter()
                    .enumerate()
                    .map(|(v, row)| {
                        let row = items.iter().cloned().zip(row).filter(|(_, d)| *d != Decision::Abstain).collect();
                        (format!("v{v:02}"), row)
                    })
                    .collect();
                (DecisionMatrix { items, decisions }, weights)
            })
    })
}

pub fn weights_of(m: &DecisionMatrix, w: &[f64]) -> BTreeMap<String, f64> {
    m.validators().zip(w).map(|(v, &w)| (v.to_owned(), w)).collect()
}

/// Head count: more accepters than rejecters, ties reject.
pub fn count_oracle(m: &DecisionMatrix) -> BTreeMap<String, Verdict> {
    m.items
        .iter()
        .map(|item| {
            let mut score = 0i64;
            for v in m.validators() {
                match m.decision(v, item) {
                    Decision::Accept => score += 1,
                    Decision::Reject => score -= 1,
                    Decision::Abstain => {}
                }
            }
            (item.clone(), if score > 0 { Verdict::Accept } else { Verdict::Reject })
        })
        .collect()
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() })
}

fn check<T: std::fmt::Debug>(result: Result<(), proptest::test_runner::TestError<T>>) {
    if let Err(e) = result {
        panic!("{e}");
    }
}

fn decision() -> impl Strategy<Value = Decision> + Clone {
    prop_oneof![Just(Decision::Accept), Just(Decision::Reject), Just(Decision::Abstain)]
}

pub fn uniform_weights_reduce_to_majority(cases: u32) {
    check(runner(cases).run(&(matrix_and_weights(), 0.01f64..100.0), |((m, _), w)| {
        let uniform: BTreeMap<String, f64> = m.validators().map(|v| (v.to_owned(), w)).collect();
        let expected = count_oracle(&m);
        prop_assert_eq!(&weighted_vote(&m, &uniform).unwrap(), &expected);
        prop_assert_eq!(&naive_majority(&m), &expected);
        Ok(())
    }));
}

pub fn positive_scaling_keeps_decisions(cases: u32) {
    let strategy = (matrix_and_weights(), prop_oneof![0.001f64..1000.0, Just(3.0)]);
    check(runner(cases).run(&strategy, |((m, w), c)| {
        let base = weights_of(&m, &w);
        let scaled: BTreeMap<String, f64> = base.iter().map(|(k, v)| (k.clone(), v * c)).collect();
        prop_assert_eq!(weighted_vote(&m, &base).unwrap(), weighted_vote(&m, &scaled).unwrap());
        Ok(())
    }));
}

pub fn zero_weight_validator_is_neutral(cases: u32) {
    let strategy = (matrix_and_weights(), prop::collection::vec(decision(), 10));
    check(runner(cases).run(&strategy, |((m, w), extra)| {
        let before = weighted_vote(&m, &weights_of(&m, &w)).unwrap();
        let mut bigger = m.clone();
        let row = m.items.iter().cloned().zip(extra).collect();
        bigger.decisions.insert("zz_zero".into(), row);
        let mut weights = weights_of(&m, &w);
        weights.insert("zz_zero".into(), 0.0);
        prop_assert_eq!(before, weighted_vote(&bigger, &weights).unwrap());
        Ok(())
    }));
}
