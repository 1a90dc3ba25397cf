//! Rule evaluation over an [`OntologyView`].
//!
//! Each element of a rule's subject set is fed through every clause
//! sequence. A sequence succeeds when it ends in a non-empty element set or
//! in a boolean that passes the function's polarity: the linguistic
//! functions detect defects, so they pass when false. The sequence outcomes
//! are combined left to right and an element whose combined outcome is
//! false is reported as a violation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::lexicon::{
    self, cosine, EmbeddingProvider, HashEmbedder, LexiconError, SenseLexicon, DEFAULT_CONJUNCTIONS,
};
use crate::onto::{OntologyView, Relation};
use crate::rdf::{Iri, Term};
use crate::rules::{
    Attribute, Clause, LinguisticFunction, OntologicalFunction, Operator, Priority,
    RelatedObject, Rule, RulePack,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("`{clause}` cannot be applied to {value}")]
    TypeMismatch { clause: String, value: String },
    #[error("`{clause}` needs a non-empty input")]
    EmptyInput { clause: String },
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error("while evaluating {element}: {source}")]
    AtElement {
        element: Iri,
        #[source]
        source: Box<EngineError>,
    },
}

/// Thresholds and text resources used by functional clauses and
/// comparative operators.
#[derive(Clone)]
pub struct EngineContext {
    pub synonymy_threshold: f64,
    pub dissimilarity_threshold: f64,
    /// Words with more senses than this count as polysemous.
    pub polysemy_threshold: u32,
    pub conjunctions: Vec<String>,
    pub lexicon: Arc<SenseLexicon>,
    pub embedder: Arc<dyn EmbeddingProvider>,
}

impl Default for EngineContext {
    fn default() -> Self {
        EngineContext {
            synonymy_threshold: 0.8,
            dissimilarity_threshold: 0.8,
            polysemy_threshold: 1,
            conjunctions: DEFAULT_CONJUNCTIONS.iter().map(|s| s.to_string()).collect(),
            lexicon: Arc::new(SenseLexicon::bundled()),
            embedder: Arc::new(HashEmbedder::default()),
        }
    }
}

impl fmt::Debug for EngineContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EngineContext")
            .field("synonymy_threshold", &self.synonymy_threshold)
            .field("dissimilarity_threshold", &self.dissimilarity_threshold)
            .field("polysemy_threshold", &self.polysemy_threshold)
            .field("conjunctions", &self.conjunctions)
            .field("embedding_dim", &self.embedder.dim())
            .finish()
    }
}

/// A value flowing between clauses: a graph term or a derived string such
/// as a local name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Node(Term),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Node(t) => write!(f, "{t}"),
            Value::Text(s) => write!(f, "{s:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalResult {
    Elements(BTreeSet<Value>),
    Boolean(bool),
}

fn mismatch(clause: Clause, value: &Value) -> EngineError {
    let what = match value {
        Value::Node(Term::Iri(_)) => "an IRI",
        Value::Node(Term::BlankNode(_)) => "a blank node",
        Value::Node(Term::Literal(_)) => "a literal",
        Value::Text(_) => "a text value",
    };
    EngineError::TypeMismatch { clause: clause.to_string(), value: format!("{what} ({value})") }
}

/// Text of a value for the text-level functions. IRIs contribute their
/// local name.
fn text_of(clause: Clause, value: &Value) -> Result<String, EngineError> {
    match value {
        Value::Text(s) => Ok(s.clone()),
        Value::Node(Term::Literal(l)) => Ok(l.lexical.clone()),
        Value::Node(Term::Iri(iri)) => Ok(iri.local_name().to_owned()),
        Value::Node(Term::BlankNode(_)) => Err(mismatch(clause, value)),
    }
}

/// Applies one clause to a set of values. Functional clauses return the raw
/// function value, before polarity is applied.
pub fn eval_clause(
    clause: Clause,
    input: &BTreeSet<Value>,
    view: &OntologyView,
    ctx: &EngineContext,
) -> Result<EvalResult, EngineError> {
    match clause {
        Clause::RelatedElement(object) => {
            let mut out = BTreeSet::new();
            for value in input {
                let term = match value {
                    Value::Node(t @ (Term::Iri(_) | Term::BlankNode(_))) => t,
                    _ => return Err(mismatch(clause, value)),
                };
                related(object, term, view, &mut out);
            }
            Ok(EvalResult::Elements(out))
        }
        Clause::Attribute(attribute) => {
            let mut out = BTreeSet::new();
            for value in input {
                match (attribute, value) {
                    (Attribute::Id, Value::Node(Term::Iri(iri))) => {
                        out.insert(Value::Text(iri.local_name().to_owned()));
                    }
                    (Attribute::Namespace, Value::Node(Term::Iri(iri))) => {
                        out.insert(Value::Text(iri.namespace().to_owned()));
                    }
                    (Attribute::Id | Attribute::Namespace, Value::Node(Term::BlankNode(_))) => {}
                    (Attribute::Language, Value::Node(Term::Literal(l))) => {
                        if let Some(lang) = &l.lang {
                            out.insert(Value::Text(lang.clone()));
                        }
                    }
                    _ => return Err(mismatch(clause, value)),
                }
            }
            Ok(EvalResult::Elements(out))
        }
        Clause::Ontological(_) | Clause::Linguistic(_) if input.is_empty() => {
            Err(EngineError::EmptyInput { clause: clause.to_string() })
        }
        Clause::Ontological(OntologicalFunction::Uniqueness) => Ok(EvalResult::Boolean(input.len() == 1)),
        Clause::Ontological(function) => {
            let texts = input.iter().map(|v| text_of(clause, v)).collect::<Result<Vec<_>, _>>()?;
            let value = match function {
                OntologicalFunction::TextValidity => texts.iter().all(|t| lexicon::text_validity(t)),
                OntologicalFunction::IdConsistency => lexicon::id_consistency(&texts),
                OntologicalFunction::Uniqueness => unreachable!(),
            };
            Ok(EvalResult::Boolean(value))
        }
        Clause::Linguistic(function) => {
            let mut found = false;
            for value in input {
                let text = text_of(clause, value)?;
                found |= match function {
                    LinguisticFunction::ContainsConjunctions => lexicon::contains_any_token(&text, &ctx.conjunctions),
                    LinguisticFunction::ContainsPolysemes => {
                        lexicon::contains_polysemes(&text, &ctx.lexicon, ctx.polysemy_threshold)
                    }
                };
            }
            Ok(EvalResult::Boolean(found))
        }
    }
}

fn related(object: RelatedObject, term: &Term, view: &OntologyView, out: &mut BTreeSet<Value>) {
    let mut add = |t: &Term| {
        out.insert(Value::Node(t.clone()));
    };
    match object {
        RelatedObject::Domain => view.objects(Relation::Domain, term).for_each(add),
        RelatedObject::Range => view.objects(Relation::Range, term).for_each(add),
        RelatedObject::Subclass => view.subjects(Relation::SubClassOf, term).for_each(add),
        RelatedObject::Superclass => view.objects(Relation::SubClassOf, term).for_each(add),
        RelatedObject::DisjointClass => view.neighbors(Relation::DisjointWith, term).into_iter().for_each(add),
        RelatedObject::EquivalentClass => view.neighbors(Relation::EquivalentClass, term).into_iter().for_each(add),
        RelatedObject::InverseProperty => view.neighbors(Relation::InverseOf, term).into_iter().for_each(add),
        RelatedObject::Label => {
            for l in view.labels_of(term) {
                add(&Term::Literal(l.clone()));
            }
        }
        RelatedObject::Comment => {
            for l in view.comments_of(term) {
                add(&Term::Literal(l.clone()));
            }
        }
        RelatedObject::Annotation => {
            for l in view.annotations_of(term) {
                add(&Term::Literal(l.clone()));
            }
        }
    }
}

/// Outcome of one clause sequence for one subject element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceOutcome {
    pub success: bool,
    /// Final element set; `None` when the sequence ends in a function.
    pub elements: Option<BTreeSet<Value>>,
    /// Why the sequence failed, or which function passed.
    pub detail: String,
}

fn describe(seq: &[Clause]) -> String {
    seq.iter().map(Clause::to_string).collect::<Vec<_>>().join(" ")
}

pub fn eval_sequence(
    seq: &[Clause],
    element: &Term,
    view: &OntologyView,
    ctx: &EngineContext,
) -> Result<SequenceOutcome, EngineError> {
    let mut current: BTreeSet<Value> = BTreeSet::from([Value::Node(element.clone())]);
    for (i, &clause) in seq.iter().enumerate() {
        if clause.is_functional() && current.is_empty() {
            let detail = format!("`{}` found nothing to check", describe(&seq[..i]));
            return Ok(SequenceOutcome { success: false, elements: None, detail });
        }
        match eval_clause(clause, &current, view, ctx)? {
            EvalResult::Elements(next) => current = next,
            EvalResult::Boolean(value) => {
                let success = match clause {
                    Clause::Linguistic(_) => !value,
                    _ => value,
                };
                let detail = match (clause, success) {
                    (Clause::Linguistic(f), false) => format!("`{}`: {} detected", describe(seq), f),
                    (_, false) => format!("`{}` is false", describe(seq)),
                    (_, true) => format!("`{}` holds", describe(seq)),
                };
                return Ok(SequenceOutcome { success, elements: None, detail });
            }
        }
    }
    let success = !current.is_empty();
    let detail = if success {
        format!("`{}` returned {} element(s)", describe(seq), current.len())
    } else {
        format!("`{}` returned no elements", describe(seq))
    };
    Ok(SequenceOutcome { success, elements: Some(current), detail })
}

/// Combined outcome of a rule for one element, with the reasons it failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleOutcome {
    pub holds: bool,
    pub detail: String,
}

pub fn eval_element(
    rule: &Rule,
    element: &Term,
    view: &OntologyView,
    ctx: &EngineContext,
) -> Result<RuleOutcome, EngineError> {
    let head = eval_sequence(&rule.head, element, view, ctx)?;
    if let Some(op) = rule.comparison() {
        let other = eval_sequence(&rule.tail[0].1, element, view, ctx)?;
        let left = head.elements.unwrap_or_default();
        let right = other.elements.unwrap_or_default();
        return compare(op, &left, &right, view, ctx);
    }

    let mut reasons = Vec::new();
    let mut holds = head.success != rule.head_negated;
    if !holds {
        reasons.push(negation_aware(&head, rule.head_negated));
    }
    for (op, seq) in &rule.tail {
        let outcome = eval_sequence(seq, element, view, ctx)?;
        match op {
            Operator::And => {
                if !outcome.success {
                    reasons.push(outcome.detail);
                }
                holds = holds && outcome.success;
            }
            Operator::Or => {
                if outcome.success {
                    reasons.clear();
                } else {
                    reasons.push(outcome.detail);
                }
                holds = holds || outcome.success;
            }
            Operator::Not => {
                if outcome.success {
                    reasons.push(negation_aware(&outcome, true));
                }
                holds = holds && !outcome.success;
            }
            _ => unreachable!("comparative operators are handled above"),
        }
    }
    Ok(RuleOutcome { holds, detail: reasons.join("; ") })
}

fn negation_aware(outcome: &SequenceOutcome, negated: bool) -> String {
    if negated {
        format!("expected failure of: {}", outcome.detail)
    } else {
        outcome.detail.clone()
    }
}

/// Equality key: literals by lexical form and language, everything else
/// exact.
fn equality_key(value: &Value) -> String {
    match value {
        Value::Node(Term::Literal(l)) => match &l.lang {
            Some(lang) => format!("\"{}\"@{}", l.lexical, lang.to_lowercase()),
            None => format!("\"{}\"", l.lexical),
        },
        Value::Node(t) => t.to_string(),
        Value::Text(s) => format!("\"{s}\""),
    }
}

/// Texts compared by the similarity operators. IRIs stand for their labels,
/// or their tokenized local name when unlabeled.
fn comparison_texts(values: &BTreeSet<Value>, view: &OntologyView) -> Vec<String> {
    let mut texts = Vec::new();
    for value in values {
        match value {
            Value::Text(s) => texts.push(s.clone()),
            Value::Node(Term::Literal(l)) => texts.push(l.lexical.clone()),
            Value::Node(t @ Term::Iri(iri)) => {
                let labels = view.labels_of(t);
                if labels.is_empty() {
                    texts.push(lexicon::tokenize_identifier(iri.local_name()).join(" "));
                } else {
                    texts.extend(labels.into_iter().map(|l| l.lexical.clone()));
                }
            }
            Value::Node(Term::BlankNode(_)) => {}
        }
    }
    texts
}

fn compare(
    op: Operator,
    left: &BTreeSet<Value>,
    right: &BTreeSet<Value>,
    view: &OntologyView,
    ctx: &EngineContext,
) -> Result<RuleOutcome, EngineError> {
    match op {
        Operator::Equality => {
            let l: BTreeSet<String> = left.iter().map(equality_key).collect();
            let r: BTreeSet<String> = right.iter().map(equality_key).collect();
            let holds = l == r;
            let detail = if holds { String::new() } else { format!("Equality failed: {l:?} differs from {r:?}") };
            Ok(RuleOutcome { holds, detail })
        }
        Operator::Inverse => {
            let inverse_in = |v: &Value, other: &BTreeSet<Value>| match v {
                Value::Node(t) => view
                    .neighbors(Relation::InverseOf, t)
                    .into_iter()
                    .any(|n| other.contains(&Value::Node(n.clone()))),
                Value::Text(_) => false,
            };
            let holds = !left.is_empty()
                && !right.is_empty()
                && left.iter().all(|v| inverse_in(v, right))
                && right.iter().all(|v| inverse_in(v, left));
            let detail = if holds { String::new() } else { "Inverse failed: sets are not declared inverses".into() };
            Ok(RuleOutcome { holds, detail })
        }
        Operator::Synonymy | Operator::Dissimilarity => {
            let lt = comparison_texts(left, view);
            let rt = comparison_texts(right, view);
            let mut best: Option<(f64, &str, &str)> = None;
            for a in &lt {
                let va = ctx.embedder.embed(a)?;
                for b in &rt {
                    let sim = cosine(&va, &ctx.embedder.embed(b)?)?;
                    if best.is_none_or(|(s, _, _)| sim > s) {
                        best = Some((sim, a, b));
                    }
                }
            }
            let (holds, detail) = match (op, best) {
                (Operator::Synonymy, Some((s, _, _))) if s >= ctx.synonymy_threshold => (true, String::new()),
                (Operator::Synonymy, Some((s, a, b))) => (
                    false,
                    format!("Synonymy failed: best pair {a:?} / {b:?} has cosine {s:.3} < {}", ctx.synonymy_threshold),
                ),
                (Operator::Synonymy, None) => (false, "Synonymy failed: nothing to compare".into()),
                (_, Some((s, a, b))) if s >= ctx.dissimilarity_threshold => (
                    false,
                    format!(
                        "Dissimilarity failed: {a:?} / {b:?} has cosine {s:.3} >= {}",
                        ctx.dissimilarity_threshold
                    ),
                ),
                _ => (true, String::new()),
            };
            Ok(RuleOutcome { holds, detail })
        }
        Operator::And | Operator::Or | Operator::Not => unreachable!("not a comparative operator"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule_id: String,
    pub element: Iri,
    pub detail: String,
}

/// Violations of one rule, in element IRI order.
pub fn eval_rule(rule: &Rule, view: &OntologyView, ctx: &EngineContext) -> Result<Vec<Violation>, EngineError> {
    let mut violations = Vec::new();
    for element in view.subject_elements(rule.subject) {
        let term = Term::Iri(element.iri.clone());
        let outcome = eval_element(rule, &term, view, ctx)
            .map_err(|e| EngineError::AtElement { element: element.iri.clone(), source: Box::new(e) })?;
        if !outcome.holds {
            violations.push(Violation { rule_id: rule.id.clone(), element: element.iri.clone(), detail: outcome.detail });
        }
    }
    Ok(violations)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportedViolation {
    pub element: Iri,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleReport {
    pub id: String,
    pub priority: Priority,
    pub count: usize,
    pub violations: Vec<ReportedViolation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ViolationReport {
    pub ontology: String,
    pub rules: Vec<RuleReport>,
    pub totals: BTreeMap<Priority, usize>,
}

impl ViolationReport {
    pub fn total(&self) -> usize {
        self.totals.values().sum()
    }

    pub fn has_errors(&self) -> bool {
        self.rules.iter().any(|r| r.error.is_some())
    }

    pub fn count(&self, priority: Priority) -> usize {
        self.totals.get(&priority).copied().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Plain-text rendering: one block per rule with violations or errors,
    /// then the totals.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<32} {:<8} {:>5}", "RULE", "PRIORITY", "COUNT");
        for rule in &self.rules {
            let _ = writeln!(out, "{:<32} {:<8} {:>5}", rule.id, rule.priority.as_str(), rule.count);
            if let Some(err) = &rule.error {
                let _ = writeln!(out, "    error: {err}");
            }
            for v in &rule.violations {
                let _ = writeln!(out, "    {}  {}", v.element, v.detail);
            }
        }
        let _ = writeln!(
            out,
            "total {}  (High {}, Medium {}, Low {})",
            self.total(),
            self.count(Priority::High),
            self.count(Priority::Medium),
            self.count(Priority::Low)
        );
        out
    }
}

/// Evaluates every rule of the pack. A rule that fails to evaluate is
/// reported with an error entry and does not stop the others.
pub fn eval_pack(ontology: &str, pack: &RulePack, view: &OntologyView, ctx: &EngineContext) -> ViolationReport {
    let mut totals: BTreeMap<Priority, usize> = Priority::ALL.into_iter().map(|p| (p, 0)).collect();
    let mut rules = Vec::with_capacity(pack.rules.len());
    for rule in &pack.rules {
        let report = match eval_rule(rule, view, ctx) {
            Ok(violations) => RuleReport {
                id: rule.id.clone(),
                priority: rule.priority,
                count: violations.len(),
                violations: violations
                    .into_iter()
                    .map(|v| ReportedViolation { element: v.element, detail: v.detail })
                    .collect(),
                error: None,
            },
            Err(e) => RuleReport {
                id: rule.id.clone(),
                priority: rule.priority,
                count: 0,
                violations: Vec::new(),
                error: Some(e.to_string()),
            },
        };
        *totals.entry(rule.priority).or_default() += report.count;
        rules.push(report);
    }
    ViolationReport { ontology: ontology.to_owned(), rules, totals }
}
