//! Checks over the bundled ontology fixtures.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use ontoqual_core::engine::{eval_pack, eval_rule, EngineContext, ViolationReport};
use ontoqual_core::onto::{apply_manifest, build_view, enrichment_diff, parse_manifest, OntologyView};
use ontoqual_core::rdf::{parse_turtle, serialize_turtle, RdfError};
use ontoqual_core::rules::{default_pack, parse_rule, print_rule, Rule};

/// Works from any crate in the workspace.
pub fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

pub fn read(relative: &str) -> String {
    let path = dir().join(relative);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn load(name: &str) -> OntologyView {
    build_view(parse_turtle(&read(&format!("ontologies/{name}")), None).unwrap())
}

pub fn rule(text: &str) -> Rule {
    let mut r = parse_rule(text).unwrap();
    r.id = "test".into();
    r
}

/// (rule id, element local name) for every violation.
pub fn pairs(report: &ViolationReport) -> BTreeSet<(String, String)> {
    report
        .rules
        .iter()
        .flat_map(|r| r.violations.iter().map(move |v| (r.id.clone(), v.element.local_name().to_owned())))
        .collect()
}

pub fn ontology_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir().join("ontologies"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "ttl"))
        .collect();
    files.sort();
    files
}

pub fn every_fixture_round_trips() {
    let files = ontology_files();
    assert!(files.len() >= 5);
    let names: Vec<String> = files.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
    assert!(names.iter().any(|n| n.starts_with("pizza")) && names.iter().any(|n| n.starts_with("security")));
    for path in files {
        let text = std::fs::read_to_string(&path).unwrap();
        let graph = parse_turtle(&text, None).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(!graph.is_empty(), "{}", path.display());
        let written = serialize_turtle(&graph);
        let again = parse_turtle(&written, None).unwrap_or_else(|e| panic!("{}: {e}\n{written}", path.display()));
        assert_eq!(again, graph, "{}", path.display());
        assert_eq!(serialize_turtle(&again), written, "{}", path.display());
    }
}

pub fn malformed_corpus_reports_positions() {
    let cases: BTreeMap<String, (usize, usize)> = serde_json::from_str(&read("malformed/cases.json")).unwrap();
    assert!(cases.len() >= 10);
    for (file, (line, column)) in cases {
        let text = read(&format!("malformed/{file}"));
        match parse_turtle(&text, None) {
            Err(RdfError::Syntax { line: l, column: c, offset, .. }) => {
                assert_eq!((l, c), (line, column), "{file}");
                // the offset must point at the reported line and column
                let before = &text[..offset];
                assert_eq!(before.matches('\n').count() + 1, l, "{file}");
                let line_start = before.rfind('\n').map_or(0, |i| i + 1);
                assert_eq!(text[line_start..offset].chars().count() + 1, c, "{file}");
            }
            other => panic!("{file}: expected a syntax error, got {other:?}"),
        }
    }
}

pub const REFERENCE_RULES: [&str; 6] = [
    "Property hasRelatedElement Domain usesLogicalOperator And hasRelatedElement Range",
    "Property hasRelatedElement Domain hasOntologicalProperty Uniqueness",
    "OntologicalElement hasRelatedElement Annotation",
    "Class hasRelatedElement Label usesComparativeOperator Dissimilarity hasRelatedElement EquivalentClass hasRelatedElement Label",
    "Class hasRelatedElement Label hasLinguisticProperty ContainsConjunctions",
    "Class hasRelatedElement Label hasLinguisticProperty ContainsPolysemes",
];

pub fn default_pack_contains_the_reference_rules() {
    let pack = default_pack();
    assert!(pack.rules.len() >= 10);
    let printed: Vec<String> = pack.rules.iter().map(print_rule).collect();
    for expected in REFERENCE_RULES {
        assert!(printed.iter().any(|p| p == expected), "missing: {expected}");
    }
    let ctx = EngineContext::default();
    let view = load("pizza_small.ttl");
    for rule in &pack.rules {
        eval_rule(rule, &view, &ctx).unwrap_or_else(|e| panic!("{}: {e}", rule.id));
    }
}

pub fn domain_and_range_rule() {
    let ctx = EngineContext::default();
    let r = rule(REFERENCE_RULES[0]);
    let violations = eval_rule(&r, &load("range_missing.ttl"), &ctx).unwrap();
    assert_eq!(violations.len(), 1);
    assert_eq!(violations[0].element.local_name(), "hasTopping");
    assert!(eval_rule(&r, &load("range_complete.ttl"), &ctx).unwrap().is_empty());
}

pub fn five_seeded_defects() {
    let ctx = EngineContext::default();
    let report = eval_pack("seeded", &default_pack(), &load("seeded_5.ttl"), &ctx);
    assert!(!report.has_errors(), "{}", report.to_table());
    let expected: BTreeSet<(String, String)> = [
        ("property-domain-range", "hasBase"),
        ("element-annotated", "servedWith"),
        ("label-conjunction", "CheeseAndTomatoPizza"),
        ("label-polyseme", "SpringPizza"),
        ("synonymous-equivalent-class", "SeafoodPizza"),
    ]
    .into_iter()
    .map(|(r, e)| (r.to_owned(), e.to_owned()))
    .collect();
    assert_eq!(pairs(&report), expected, "{}", report.to_table());
    assert_eq!(report.total(), 5);

    let clean = eval_pack("clean", &default_pack(), &load("seeded_5_clean.ttl"), &ctx);
    assert_eq!(clean.total(), 0, "{}", clean.to_table());
}

/// Enriched item keys of the pizza pair, checked against the manifest.
pub fn pizza_enrichment_keys() -> BTreeSet<String> {
    let enriched = load("pizza_enriched.ttl");
    let diff = enrichment_diff(&load("pizza_base.ttl"), &enriched);
    let keys: BTreeSet<String> = diff.validation_items(true).into_iter().map(|i| i.item_key).collect();
    let manifest = parse_manifest(&read("ontologies/pizza_manifest.json")).unwrap();
    let flagged = apply_manifest(&enriched, &manifest).unwrap();
    let manifest_keys: BTreeSet<String> = flagged.validation_items(true).into_iter().map(|i| i.item_key).collect();
    assert_eq!(manifest_keys, keys);
    keys
}
