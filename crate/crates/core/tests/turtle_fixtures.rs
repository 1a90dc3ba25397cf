use ontoqual_core::rdf::{parse_turtle, serialize_turtle, Iri, Literal, RdfGraph, Term, Triple};
use proptest::prelude::*;

#[path = "support/fixtures.rs"]
mod fixtures;

#[test]
fn every_fixture_round_trips() {
    fixtures::every_fixture_round_trips();
}

#[test]
fn malformed_corpus_reports_positions() {
    fixtures::malformed_corpus_reports_positions();
}

#[test]
fn pizza_fixture_shape() {
    let text = fixtures::read("ontologies/pizza_small.ttl");
    let g = parse_turtle(&text, None).unwrap();
    let union = Iri::new("http://www.w3.org/2002/07/owl#unionOf").unwrap();
    assert_eq!(g.query(None, Some(&union), None).len(), 1);
    let first = Iri::new("http://www.w3.org/1999/02/22-rdf-syntax-ns#first").unwrap();
    assert_eq!(g.query(None, Some(&first), None).len(), 2);
    let comment = Iri::new("http://www.w3.org/2000/01/rdf-schema#comment").unwrap();
    let margherita = Term::Iri(Iri::new("http://example.org/pizza#Margherita").unwrap());
    let lit = g.query(Some(&margherita), Some(&comment), None)[0].object.as_literal().unwrap().clone();
    assert!(lit.lexical.contains("\"mozzarella\"\nand"));
}

fn arb_iri() -> impl Strategy<Value = Iri> {
    prop_oneof![
        "[a-z]{1,6}".prop_map(|s| Iri::new(format!("http://example.org/ns#{s}")).unwrap()),
        "[a-z0-9]{1,4}".prop_map(|s| Iri::new(format!("http://other.example/{s}/x.y")).unwrap()),
        "[A-Za-z0-9%]{1,5}".prop_map(|s| Iri::new(format!("urn:x:{s}")).unwrap()),
    ]
}

fn arb_literal() -> impl Strategy<Value = Literal> {
    prop_oneof![
        "\\PC{0,12}".prop_map(Literal::simple),
        ("[ -~\n\t\"\\\\]{0,12}", "[a-z]{2}(-[A-Z]{2})?").prop_map(|(s, l)| Literal::lang_string(s, l)),
        ("[0-9]{1,4}", arb_iri()).prop_map(|(s, dt)| Literal::typed(s, dt)),
    ]
}

fn arb_node() -> impl Strategy<Value = Term> {
    prop_oneof![arb_iri().prop_map(Term::Iri), "b[0-9]{1,2}".prop_map(Term::BlankNode)]
}

fn arb_triple() -> impl Strategy<Value = Triple> {
    let object = prop_oneof![arb_node(), arb_literal().prop_map(Term::Literal)];
    (arb_node(), arb_iri(), object).prop_map(|(s, p, o)| Triple::new(s, p, o))
}

proptest! {
    #[test]
    fn random_graphs_round_trip(triples in proptest::collection::vec(arb_triple(), 0..25)) {
        let graph: RdfGraph = triples.into_iter().collect();
        let text = serialize_turtle(&graph);
        let again = parse_turtle(&text, None).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(again, graph);
    }
}
