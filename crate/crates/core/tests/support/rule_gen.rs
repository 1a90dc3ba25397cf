//! Random valid rule ASTs.
#![allow(dead_code)]

use ontoqual_core::onto::ElementKind;
use ontoqual_core::rules::{
    parse_rule, print_rule, Attribute, Clause, ClauseSequence, LinguisticFunction, OntologicalFunction, Operator,
    Priority, RelatedObject, Rule, RuleError,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

fn clause_strategy(extractive_only: bool) -> BoxedStrategy<Clause> {
    let extractive = prop_oneof![
        proptest::sample::select(RelatedObject::ALL).prop_map(Clause::RelatedElement),
        proptest::sample::select(Attribute::ALL).prop_map(Clause::Attribute),
    ];
    if extractive_only {
        return extractive.boxed();
    }
    prop_oneof![
        proptest::sample::select(OntologicalFunction::ALL).prop_map(Clause::Ontological),
        proptest::sample::select(LinguisticFunction::ALL).prop_map(Clause::Linguistic),
    ]
    .boxed()
}

fn sequence_strategy(extractive_only: bool) -> impl Strategy<Value = ClauseSequence> {
    (
        proptest::collection::vec(clause_strategy(true), 0..3),
        proptest::option::of(clause_strategy(extractive_only)),
        clause_strategy(true),
    )
        .prop_map(|(mut seq, last, fallback)| {
            seq.push(last.unwrap_or(fallback));
            seq
        })
}

pub fn rule_strategy() -> impl Strategy<Value = Rule> {
    let subject = proptest::sample::select(ElementKind::ALL.to_vec());
    let logical = (
        subject.clone(),
        any::<bool>(),
        sequence_strategy(false),
        proptest::collection::vec(
            (proptest::sample::select(vec![Operator::And, Operator::Or, Operator::Not]), sequence_strategy(false)),
            0..4,
        ),
    )
        .prop_map(|(subject, head_negated, head, tail)| Rule {
            id: String::new(),
            priority: Priority::Medium,
            subject,
            head_negated,
            head,
            tail,
        });
    let comparative = (
        subject,
        sequence_strategy(true),
        proptest::sample::select(vec![Operator::Equality, Operator::Inverse, Operator::Synonymy, Operator::Dissimilarity]),
        sequence_strategy(true),
    )
        .prop_map(|(subject, head, op, other)| Rule {
            id: String::new(),
            priority: Priority::Medium,
            subject,
            head_negated: false,
            head,
            tail: vec![(op, other)],
        });
    prop_oneof![3 => logical, 1 => comparative]
}

/// Runs `print_rule` then `parse_rule` on `cases` random rules.
pub fn print_then_parse_is_identity(cases: u32) {
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    let result = runner.run(&rule_strategy(), |rule| {
        let text = print_rule(&rule);
        prop_assert_eq!(parse_rule(&text).unwrap(), rule);
        Ok(())
    });
    if let Err(e) = result {
        panic!("{e}");
    }
}

/// Replacing any token with an unknown word is reported at that token.
pub fn unknown_keyword_points_at_the_token(cases: u32) {
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    let result = runner.run(&(rule_strategy(), any::<prop::sample::Index>()), |(rule, pick)| {
        let text = print_rule(&rule);
        let mut tokens: Vec<String> = text.split_whitespace().map(str::to_owned).collect();
        let at = pick.index(tokens.len());
        tokens[at] = "Bogus".into();
        let err = parse_rule(&tokens.join("  ")).unwrap_err();
        prop_assert_eq!(err, RuleError::UnknownKeyword { position: at, token: "Bogus".into() });
        Ok(())
    });
    if let Err(e) = result {
        panic!("{e}");
    }
}
