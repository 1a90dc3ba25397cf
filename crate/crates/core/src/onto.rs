//! OWL-level projection of an RDF graph: the elements rules range over, the
//! structural relations between them, and which of them are enriched.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rdf::vocab::{self, OWL, RDF, RDFS, XSD};
use crate::rdf::{Iri, Literal, RdfGraph, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OntoError {
    #[error("manifest names elements not present in the ontology: {}", .0.join(", "))]
    UnknownElement(Vec<String>),
    #[error("malformed manifest: {0}")]
    Manifest(String),
}

/// The element kinds a rule subject can range over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ElementKind {
    OntologyMetadata,
    Class,
    Instance,
    Property,
    ObjectProperty,
    DatatypeProperty,
    SymmetricProperty,
    OntologicalElement,
}

impl ElementKind {
    pub const ALL: [ElementKind; 8] = [
        ElementKind::OntologyMetadata,
        ElementKind::Class,
        ElementKind::Instance,
        ElementKind::Property,
        ElementKind::ObjectProperty,
        ElementKind::DatatypeProperty,
        ElementKind::SymmetricProperty,
        ElementKind::OntologicalElement,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            ElementKind::OntologyMetadata => "OntologyMetadata",
            ElementKind::Class => "Class",
            ElementKind::Instance => "Instance",
            ElementKind::Property => "Property",
            ElementKind::ObjectProperty => "ObjectProperty",
            ElementKind::DatatypeProperty => "DatatypeProperty",
            ElementKind::SymmetricProperty => "SymmetricProperty",
            ElementKind::OntologicalElement => "OntologicalElement",
        }
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// Structural relations indexed by the view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Relation {
    Domain,
    Range,
    SubClassOf,
    DisjointWith,
    EquivalentClass,
    InverseOf,
}

impl Relation {
    pub const ALL: [Relation; 6] = [
        Relation::Domain,
        Relation::Range,
        Relation::SubClassOf,
        Relation::DisjointWith,
        Relation::EquivalentClass,
        Relation::InverseOf,
    ];

    pub fn predicate(self) -> Iri {
        match self {
            Relation::Domain => vocab::rdfs::domain(),
            Relation::Range => vocab::rdfs::range(),
            Relation::SubClassOf => vocab::rdfs::sub_class_of(),
            Relation::DisjointWith => vocab::owl::disjoint_with(),
            Relation::EquivalentClass => vocab::owl::equivalent_class(),
            Relation::InverseOf => vocab::owl::inverse_of(),
        }
    }

    fn from_predicate(p: &Iri) -> Option<Relation> {
        Relation::ALL.into_iter().find(|r| &r.predicate() == p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RelationEdge {
    pub subject: Term,
    pub relation: Relation,
    pub object: Term,
}

impl RelationEdge {
    /// Item key used when an edge is validated on its own.
    pub fn key(&self) -> String {
        format!("{} <{}> {}", self.subject, self.relation.predicate(), self.object)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OntologyElement {
    pub iri: Iri,
    /// Most specific kind; `kinds` holds every kind the element belongs to.
    pub kind: ElementKind,
    pub kinds: BTreeSet<ElementKind>,
    pub labels: Vec<Literal>,
    pub comments: Vec<Literal>,
    pub annotations: Vec<(Iri, Literal)>,
    pub enriched: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ItemKind {
    Concept,
    Relation,
    Instance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Neighbor {
    pub predicate: String,
    pub direction: String,
    pub target: String,
}

/// Something a validator can accept or reject.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationItem {
    pub item_key: String,
    pub item_kind: ItemKind,
    pub enriched: bool,
    pub labels: Vec<String>,
    pub neighbors: Vec<Neighbor>,
}

type RelationIndex = BTreeMap<(Relation, Term), BTreeSet<Term>>;

#[derive(Debug, Clone)]
pub struct OntologyView {
    graph: Arc<RdfGraph>,
    elements: BTreeMap<Iri, OntologyElement>,
    forward: RelationIndex,
    backward: RelationIndex,
    declared_annotation: BTreeSet<Iri>,
    enriched_edges: BTreeSet<RelationEdge>,
}

const ANNOTATION_NAMESPACES: [&str; 3] = [
    "http://www.w3.org/2004/02/skos/core#",
    "http://purl.org/dc/elements/1.1/",
    "http://purl.org/dc/terms/",
];

fn is_builtin(iri: &Iri) -> bool {
    [RDF, RDFS, OWL, XSD].iter().any(|ns| iri.as_str().starts_with(ns))
}

/// Builds the element model of `graph`. Every enriched flag starts false.
pub fn build_view(graph: RdfGraph) -> OntologyView {
    OntologyView::new(Arc::new(graph))
}

impl OntologyView {
    pub fn new(graph: Arc<RdfGraph>) -> Self {
        let rdf_type = vocab::rdf::type_();
        let declared_annotation: BTreeSet<Iri> = graph
            .query(None, Some(&rdf_type), Some(&Term::Iri(vocab::owl::annotation_property())))
            .into_iter()
            .filter_map(|t| t.subject.as_iri().cloned())
            .collect();

        let mut kinds: BTreeMap<Iri, BTreeSet<ElementKind>> = BTreeMap::new();
        for t in graph.query(None, Some(&rdf_type), None) {
            let (Some(subject), Some(class)) = (t.subject.as_iri(), t.object.as_iri()) else {
                continue;
            };
            let mut add = |k: ElementKind| {
                kinds.entry(subject.clone()).or_default().insert(k);
            };
            if *class == vocab::owl::ontology() {
                add(ElementKind::OntologyMetadata);
            } else if *class == vocab::owl::class() || *class == vocab::rdfs::class() {
                add(ElementKind::Class);
            } else if *class == vocab::owl::object_property() {
                add(ElementKind::ObjectProperty);
            } else if *class == vocab::owl::datatype_property() {
                add(ElementKind::DatatypeProperty);
            } else if *class == vocab::owl::symmetric_property() {
                add(ElementKind::SymmetricProperty);
            } else if *class == vocab::rdf::property() {
                add(ElementKind::Property);
            } else if *class == vocab::owl::named_individual() || !is_builtin(class) {
                add(ElementKind::Instance);
            }
        }

        let mut elements = BTreeMap::new();
        for (iri, mut set) in kinds {
            if set.iter().any(|k| {
                matches!(k, ElementKind::ObjectProperty | ElementKind::DatatypeProperty | ElementKind::SymmetricProperty)
            }) {
                set.insert(ElementKind::Property);
            }
            set.insert(ElementKind::OntologicalElement);
            let kind = [
                ElementKind::OntologyMetadata,
                ElementKind::Class,
                ElementKind::SymmetricProperty,
                ElementKind::ObjectProperty,
                ElementKind::DatatypeProperty,
                ElementKind::Property,
                ElementKind::Instance,
            ]
            .into_iter()
            .find(|k| set.contains(k))
            .unwrap_or(ElementKind::OntologicalElement);

            let subject = Term::Iri(iri.clone());
            let mut labels = Vec::new();
            let mut comments = Vec::new();
            let mut annotations = Vec::new();
            for t in graph.query(Some(&subject), None, None) {
                let Some(lit) = t.object.as_literal() else { continue };
                if t.predicate == vocab::rdfs::label() {
                    labels.push(lit.clone());
                } else if t.predicate == vocab::rdfs::comment() {
                    comments.push(lit.clone());
                }
                if is_annotation_predicate(&t.predicate, &declared_annotation) {
                    annotations.push((t.predicate.clone(), lit.clone()));
                }
            }
            elements.insert(
                iri.clone(),
                OntologyElement { iri, kind, kinds: set, labels, comments, annotations, enriched: false },
            );
        }

        let mut forward: RelationIndex = BTreeMap::new();
        let mut backward: RelationIndex = BTreeMap::new();
        for t in graph.iter() {
            if let Some(rel) = Relation::from_predicate(&t.predicate) {
                forward.entry((rel, t.subject.clone())).or_default().insert(t.object.clone());
                backward.entry((rel, t.object.clone())).or_default().insert(t.subject.clone());
            }
        }

        OntologyView { graph, elements, forward, backward, declared_annotation, enriched_edges: BTreeSet::new() }
    }

    pub fn graph(&self) -> &RdfGraph {
        &self.graph
    }

    pub fn elements(&self) -> impl Iterator<Item = &OntologyElement> {
        self.elements.values()
    }

    pub fn element(&self, iri: &Iri) -> Option<&OntologyElement> {
        self.elements.get(iri)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements a rule with this subject keyword ranges over, in IRI order.
    pub fn subject_elements(&self, kind: ElementKind) -> Vec<&OntologyElement> {
        self.elements.values().filter(|e| e.kinds.contains(&kind)).collect()
    }

    /// Objects `o` of `(term, relation, o)`.
    pub fn objects(&self, relation: Relation, term: &Term) -> impl Iterator<Item = &Term> {
        self.forward.get(&(relation, term.clone())).into_iter().flatten()
    }

    /// Subjects `s` of `(s, relation, term)`.
    pub fn subjects(&self, relation: Relation, term: &Term) -> impl Iterator<Item = &Term> {
        self.backward.get(&(relation, term.clone())).into_iter().flatten()
    }

    /// Terms linked to `term` by `relation` in either direction.
    pub fn neighbors(&self, relation: Relation, term: &Term) -> BTreeSet<&Term> {
        self.objects(relation, term).chain(self.subjects(relation, term)).collect()
    }

    pub fn edges(&self) -> impl Iterator<Item = RelationEdge> + '_ {
        self.forward.iter().flat_map(|((rel, s), objects)| {
            objects.iter().map(move |o| RelationEdge { subject: s.clone(), relation: *rel, object: o.clone() })
        })
    }

    pub fn has_edge(&self, edge: &RelationEdge) -> bool {
        self.forward
            .get(&(edge.relation, edge.subject.clone()))
            .is_some_and(|objs| objs.contains(&edge.object))
    }

    /// `rdfs:label` literals of any term, element or not.
    pub fn labels_of(&self, term: &Term) -> Vec<&Literal> {
        self.literals_of(term, &vocab::rdfs::label())
    }

    pub fn comments_of(&self, term: &Term) -> Vec<&Literal> {
        self.literals_of(term, &vocab::rdfs::comment())
    }

    fn literals_of(&self, term: &Term, predicate: &Iri) -> Vec<&Literal> {
        self.graph
            .query(Some(term), Some(predicate), None)
            .into_iter()
            .filter_map(|t| t.object.as_literal())
            .collect()
    }

    /// Annotation literals of any term.
    pub fn annotations_of(&self, term: &Term) -> Vec<&Literal> {
        if let Some(e) = term.as_iri().and_then(|iri| self.elements.get(iri)) {
            return e.annotations.iter().map(|(_, l)| l).collect();
        }
        self.graph
            .query(Some(term), None, None)
            .into_iter()
            .filter(|t| is_annotation_predicate(&t.predicate, &self.declared_annotation))
            .filter_map(|t| t.object.as_literal())
            .collect()
    }

    pub fn enriched_elements(&self) -> impl Iterator<Item = &OntologyElement> {
        self.elements.values().filter(|e| e.enriched)
    }

    pub fn enriched_edges(&self) -> &BTreeSet<RelationEdge> {
        &self.enriched_edges
    }

    /// Validation items: enriched elements plus enriched edges between named
    /// nodes that are not themselves enriched. With `only_enriched` false,
    /// every element and every named edge is listed.
    pub fn validation_items(&self, only_enriched: bool) -> Vec<ValidationItem> {
        let mut items: Vec<ValidationItem> = self
            .elements
            .values()
            .filter(|e| !only_enriched || e.enriched)
            .map(|e| ValidationItem {
                item_key: e.iri.to_string(),
                item_kind: item_kind(e),
                enriched: e.enriched,
                labels: e.labels.iter().map(|l| l.lexical.clone()).collect(),
                neighbors: self.neighbor_summary(&Term::Iri(e.iri.clone())),
            })
            .collect();

        let is_new = |t: &Term| t.as_iri().and_then(|i| self.elements.get(i)).is_some_and(|e| e.enriched);
        let edges: Vec<RelationEdge> = if only_enriched {
            self.enriched_edges.iter().cloned().collect()
        } else {
            self.edges().collect()
        };
        for edge in edges {
            let named = edge.subject.as_iri().is_some() && edge.object.as_iri().is_some();
            if !named || is_new(&edge.subject) || is_new(&edge.object) {
                continue;
            }
            let enriched = self.enriched_edges.contains(&edge);
            items.push(ValidationItem {
                item_key: edge.key(),
                item_kind: ItemKind::Relation,
                enriched,
                labels: Vec::new(),
                neighbors: vec![
                    Neighbor { predicate: edge.relation.predicate().to_string(), direction: "subject".into(), target: edge.subject.to_string() },
                    Neighbor { predicate: edge.relation.predicate().to_string(), direction: "object".into(), target: edge.object.to_string() },
                ],
            });
        }
        items
    }

    /// Looks up a validation item by key among the enriched items.
    pub fn enriched_item(&self, key: &str) -> Option<ValidationItem> {
        self.validation_items(true).into_iter().find(|i| i.item_key == key)
    }

    fn neighbor_summary(&self, term: &Term) -> Vec<Neighbor> {
        let mut out = Vec::new();
        for t in self.graph.query(Some(term), None, None) {
            if !t.object.is_literal() {
                out.push(Neighbor { predicate: t.predicate.to_string(), direction: "out".into(), target: display_term(&t.object) });
            }
        }
        for t in self.graph.query(None, None, Some(term)) {
            out.push(Neighbor { predicate: t.predicate.to_string(), direction: "in".into(), target: display_term(&t.subject) });
        }
        out
    }

    fn clear_flags(&mut self) {
        for e in self.elements.values_mut() {
            e.enriched = false;
        }
        self.enriched_edges.clear();
    }
}

fn display_term(term: &Term) -> String {
    match term {
        Term::Iri(iri) => iri.to_string(),
        other => other.to_string(),
    }
}

fn item_kind(e: &OntologyElement) -> ItemKind {
    match e.kind {
        ElementKind::Instance => ItemKind::Instance,
        ElementKind::Property
        | ElementKind::ObjectProperty
        | ElementKind::DatatypeProperty
        | ElementKind::SymmetricProperty => ItemKind::Relation,
        _ => ItemKind::Concept,
    }
}

fn is_annotation_predicate(p: &Iri, declared: &BTreeSet<Iri>) -> bool {
    *p == vocab::rdfs::label()
        || *p == vocab::rdfs::comment()
        || *p == vocab::rdfs::see_also()
        || *p == vocab::rdfs::is_defined_by()
        || *p == vocab::owl::version_info()
        || ANNOTATION_NAMESPACES.iter().any(|ns| p.as_str().starts_with(ns))
        || declared.contains(p)
}

/// Flags on `enriched` exactly the elements whose IRI is not an element of
/// `base`, and the relation edges `base` lacks.
pub fn enrichment_diff(base: &OntologyView, enriched: &OntologyView) -> OntologyView {
    let mut view = enriched.clone();
    view.clear_flags();
    for e in view.elements.values_mut() {
        e.enriched = !base.elements.contains_key(&e.iri);
    }
    view.enriched_edges = enriched.edges().filter(|edge| !base.has_edge(edge)).collect();
    view
}

/// Flags exactly the listed elements.
pub fn apply_manifest(view: &OntologyView, manifest: &[Iri]) -> Result<OntologyView, OntoError> {
    let unknown: Vec<String> =
        manifest.iter().filter(|iri| !view.elements.contains_key(*iri)).map(|i| i.to_string()).collect();
    if !unknown.is_empty() {
        return Err(OntoError::UnknownElement(unknown));
    }
    let mut out = view.clone();
    out.clear_flags();
    for iri in manifest {
        if let Some(e) = out.elements.get_mut(iri) {
            e.enriched = true;
        }
    }
    Ok(out)
}

/// Reads a manifest file: a JSON array of absolute IRI strings.
pub fn parse_manifest(text: &str) -> Result<Vec<Iri>, OntoError> {
    serde_json::from_str::<Vec<Iri>>(text).map_err(|e| OntoError::Manifest(e.to_string()))
}
