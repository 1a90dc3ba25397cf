use std::collections::BTreeMap;
use std::fmt;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use super::RdfError;

/// An absolute IRI.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Iri(String);

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self, RdfError> {
        let value = value.into();
        if value.is_empty() {
            return Err(RdfError::InvalidIri { value, reason: "empty" });
        }
        if value.chars().any(char::is_whitespace) {
            return Err(RdfError::InvalidIri { value, reason: "contains whitespace" });
        }
        if !has_scheme(&value) {
            return Err(RdfError::InvalidIri { value, reason: "no scheme" });
        }
        Ok(Iri(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Local part after the last `#`, `/` or `:`.
    pub fn local_name(&self) -> &str {
        let cut = self.0.rfind(['#', '/', ':']).map(|i| i + 1).unwrap_or(0);
        &self.0[cut..]
    }

    /// Everything up to and including the last `#`, `/` or `:`.
    pub fn namespace(&self) -> &str {
        let cut = self.0.rfind(['#', '/', ':']).map(|i| i + 1).unwrap_or(0);
        &self.0[..cut]
    }
}

pub(crate) fn has_scheme(value: &str) -> bool {
    match value.find(':') {
        Some(0) | None => false,
        Some(i) => {
            let scheme = &value[..i];
            scheme.starts_with(|c: char| c.is_ascii_alphabetic())
                && scheme
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
        }
    }
}

impl TryFrom<String> for Iri {
    type Error = RdfError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        Iri::new(value)
    }
}

impl From<Iri> for String {
    fn from(iri: Iri) -> Self {
        iri.0
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// An RDF literal. `datatype` and `lang` are never both set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub lexical: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub datatype: Option<Iri>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lang: Option<String>,
}

impl Literal {
    pub fn simple(lexical: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), datatype: None, lang: None }
    }

    pub fn lang_string(lexical: impl Into<String>, lang: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), datatype: None, lang: Some(lang.into()) }
    }

    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Self {
        Literal { lexical: lexical.into(), datatype: Some(datatype), lang: None }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", self.lexical)?;
        if let Some(lang) = &self.lang {
            write!(f, "@{lang}")?;
        } else if let Some(dt) = &self.datatype {
            write!(f, "^^<{dt}>")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    Iri(Iri),
    BlankNode(String),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            _ => None,
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<Literal> for Term {
    fn from(lit: Literal) -> Self {
        Term::Literal(lit)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "<{iri}>"),
            Term::BlankNode(label) => write!(f, "_:{label}"),
            Term::Literal(lit) => lit.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    /// Panics if `subject` is a literal.
    pub fn new(subject: impl Into<Term>, predicate: Iri, object: impl Into<Term>) -> Self {
        let subject = subject.into();
        assert!(!subject.is_literal(), "literal in subject position");
        Triple { subject, predicate, object: object.into() }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <{}> {}", self.subject, self.predicate, self.object)
    }
}

/// An insertion-ordered set of triples plus the prefix table it was written with.
#[derive(Debug, Clone, Default)]
pub struct RdfGraph {
    triples: IndexSet<Triple>,
    prefixes: BTreeMap<String, Iri>,
    base: Option<Iri>,
}

impl RdfGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false when the triple was already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        self.triples.insert(triple)
    }

    pub fn add_prefix(&mut self, prefix: impl Into<String>, iri: Iri) {
        self.prefixes.insert(prefix.into(), iri);
    }

    pub fn set_base(&mut self, base: Option<Iri>) {
        self.base = base;
    }

    pub fn base(&self) -> Option<&Iri> {
        self.base.as_ref()
    }

    pub fn prefixes(&self) -> &BTreeMap<String, Iri> {
        &self.prefixes
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    /// All triples matching the bound positions, in graph order.
    pub fn query(&self, s: Option<&Term>, p: Option<&Iri>, o: Option<&Term>) -> Vec<&Triple> {
        self.triples
            .iter()
            .filter(|t| s.is_none_or(|s| &t.subject == s))
            .filter(|t| p.is_none_or(|p| &t.predicate == p))
            .filter(|t| o.is_none_or(|o| &t.object == o))
            .collect()
    }

    /// Triple-set equality, ignoring order and prefixes.
    pub fn same_triples(&self, other: &RdfGraph) -> bool {
        self.len() == other.len() && self.triples.iter().all(|t| other.contains(t))
    }
}

impl PartialEq for RdfGraph {
    fn eq(&self, other: &Self) -> bool {
        self.same_triples(other)
    }
}

impl Eq for RdfGraph {}

impl FromIterator<Triple> for RdfGraph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        RdfGraph { triples: iter.into_iter().collect(), ..Default::default() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iri_validation() {
        assert!(Iri::new("http://e/a").is_ok());
        assert!(Iri::new("urn:x").is_ok());
        assert!(Iri::new("").is_err());
        assert!(Iri::new("http://e/a b").is_err());
        assert!(Iri::new("relative/path").is_err());
        assert!(Iri::new(":nope").is_err());
    }

    #[test]
    fn local_name_and_namespace() {
        let iri = Iri::new("http://example.org/pizza#TandooriPizza").unwrap();
        assert_eq!(iri.local_name(), "TandooriPizza");
        assert_eq!(iri.namespace(), "http://example.org/pizza#");
        let iri = Iri::new("http://example.org/onto/hasTopping").unwrap();
        assert_eq!(iri.local_name(), "hasTopping");
    }

    #[test]
    fn duplicate_insert_is_ignored() {
        let mut g = RdfGraph::new();
        let t = Triple::new(
            Iri::new("http://e/a").unwrap(),
            Iri::new("http://e/p").unwrap(),
            Iri::new("http://e/b").unwrap(),
        );
        assert!(g.insert(t.clone()));
        assert!(!g.insert(t));
        assert_eq!(g.len(), 1);
    }
}
