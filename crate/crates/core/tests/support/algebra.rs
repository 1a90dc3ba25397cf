//! Random small ontologies and a per-element truth evaluator for rule atoms.
#![allow(dead_code)]

use std::collections::BTreeSet;

use ontoqual_core::engine::{eval_rule, EngineContext};
use ontoqual_core::onto::{build_view, ElementKind, OntologyView};
use ontoqual_core::rdf::{vocab, Iri, Literal, RdfGraph, Term, Triple};
use ontoqual_core::rules::parse_rule;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

const NS: &str = "http://example.org/random#";
const WORDS: [&str; 8] = ["pizza", "cheese", "and", "tomato", "or", "topping", "base", "spicy"];

#[derive(Debug, Clone)]
pub struct ElementSpec {
    pub is_class: bool,
    pub labels: Vec<Vec<usize>>,
    pub comment: bool,
    pub domain: Option<usize>,
    pub parent: Option<usize>,
}

pub fn element_spec() -> impl Strategy<Value = ElementSpec> {
    (
        any::<bool>(),
        proptest::collection::vec(proptest::collection::vec(0..WORDS.len(), 1..4), 0..3),
        any::<bool>(),
        proptest::option::of(0usize..30),
        proptest::option::of(0usize..30),
    )
        .prop_map(|(is_class, labels, comment, domain, parent)| ElementSpec { is_class, labels, comment, domain, parent })
}

fn iri(i: usize) -> Iri {
    Iri::new(format!("{NS}e{i}")).unwrap()
}

pub fn build(specs: &[ElementSpec]) -> RdfGraph {
    let n = specs.len();
    let mut g = RdfGraph::new();
    for (i, spec) in specs.iter().enumerate() {
        let s = Term::Iri(iri(i));
        let kind = if spec.is_class { vocab::owl::class() } else { vocab::owl::object_property() };
        g.insert(Triple::new(s.clone(), vocab::rdf::type_(), Term::Iri(kind)));
        for words in &spec.labels {
            let text = words.iter().map(|&w| WORDS[w]).collect::<Vec<_>>().join(" ");
            g.insert(Triple::new(s.clone(), vocab::rdfs::label(), Term::Literal(Literal::simple(text))));
        }
        if spec.comment {
            g.insert(Triple::new(s.clone(), vocab::rdfs::comment(), Term::Literal(Literal::simple("c"))));
        }
        if let Some(d) = spec.domain.filter(|_| !spec.is_class) {
            g.insert(Triple::new(s.clone(), vocab::rdfs::domain(), Term::Iri(iri(d % n))));
        }
        if let Some(p) = spec.parent.filter(|&p| spec.is_class && p % n != i) {
            g.insert(Triple::new(s.clone(), vocab::rdfs::sub_class_of(), Term::Iri(iri(p % n))));
        }
    }
    g
}

/// Clause sequences used as operands, each with a direct truth function
/// over the graph.
pub const ATOMS: [&str; 6] = [
    "hasRelatedElement Label",
    "hasRelatedElement Comment",
    "hasRelatedElement Domain",
    "hasRelatedElement Subclass",
    "hasRelatedElement Label hasLinguisticProperty ContainsConjunctions",
    "hasRelatedElement Label hasOntologicalProperty Uniqueness",
];

fn literals(g: &RdfGraph, s: &Term, p: &Iri) -> BTreeSet<String> {
    g.iter()
        .filter(|t| &t.subject == s && &t.predicate == p)
        .filter_map(|t| t.object.as_literal().map(|l| l.lexical.clone()))
        .collect()
}

pub fn oracle(atom: usize, g: &RdfGraph, e: &Term) -> bool {
    match atom {
        0 => !literals(g, e, &vocab::rdfs::label()).is_empty(),
        1 => !literals(g, e, &vocab::rdfs::comment()).is_empty(),
        2 => g.iter().any(|t| &t.subject == e && t.predicate == vocab::rdfs::domain()),
        3 => g.iter().any(|t| &t.object == e && t.predicate == vocab::rdfs::sub_class_of()),
        4 => {
            let labels = literals(g, e, &vocab::rdfs::label());
            !labels.is_empty() && labels.iter().all(|l| l.split(' ').all(|w| w != "and" && w != "or"))
        }
        5 => literals(g, e, &vocab::rdfs::label()).len() == 1,
        _ => unreachable!(),
    }
}

pub fn violations(text: &str, view: &OntologyView, ctx: &EngineContext) -> BTreeSet<Iri> {
    let mut rule = parse_rule(text).unwrap();
    rule.id = "r".into();
    eval_rule(&rule, view, ctx).unwrap().into_iter().map(|v| v.element).collect()
}

/// And is the union of violations, Or the intersection and Not the
/// complement, each also checked against the truth evaluator.
pub fn logical_operators_follow_set_algebra(cases: u32) {
    let strategy = (proptest::collection::vec(element_spec(), 1..=30), 0..ATOMS.len(), 0..ATOMS.len());
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    let result = runner.run(&strategy, |(specs, a, b)| {
        let graph = build(&specs);
        let view = build_view(graph.clone());
        let ctx = EngineContext::default();
        let subject = "OntologicalElement";
        let subjects: BTreeSet<Iri> =
            view.subject_elements(ElementKind::OntologicalElement).into_iter().map(|e| e.iri.clone()).collect();
        prop_assert_eq!(subjects.len(), specs.len());

        let va = violations(&format!("{subject} {}", ATOMS[a]), &view, &ctx);
        let vb = violations(&format!("{subject} {}", ATOMS[b]), &view, &ctx);
        let and = violations(&format!("{subject} {} usesLogicalOperator And {}", ATOMS[a], ATOMS[b]), &view, &ctx);
        let or = violations(&format!("{subject} {} usesLogicalOperator Or {}", ATOMS[a], ATOMS[b]), &view, &ctx);
        let not = violations(&format!("{subject} usesLogicalOperator Not {}", ATOMS[a]), &view, &ctx);

        prop_assert_eq!(&and, &va.union(&vb).cloned().collect());
        prop_assert_eq!(&or, &va.intersection(&vb).cloned().collect());
        prop_assert_eq!(&not, &subjects.difference(&va).cloned().collect());

        // brute-force truth table per element
        let truth = |atom: usize| -> BTreeSet<Iri> {
            subjects.iter().filter(|e| !oracle(atom, &graph, &Term::Iri((*e).clone()))).cloned().collect()
        };
        let (ta, tb) = (truth(a), truth(b));
        prop_assert_eq!(&va, &ta);
        prop_assert_eq!(&vb, &tb);
        let and_oracle: BTreeSet<Iri> = subjects
            .iter()
            .filter(|e| {
                let t = Term::Iri((*e).clone());
                !(oracle(a, &graph, &t) && oracle(b, &graph, &t))
            })
            .cloned()
            .collect();
        prop_assert_eq!(and, and_oracle);
        Ok(())
    });
    if let Err(e) = result {
        panic!("{e}");
    }
}
