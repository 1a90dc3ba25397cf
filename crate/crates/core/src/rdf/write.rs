use std::collections::BTreeMap;
use std::fmt::Write;

use super::vocab::{self, WELL_KNOWN_PREFIXES};
use super::{Iri, Literal, RdfGraph, Term, Triple};

/// Writes the graph as Turtle.
///
/// Output is deterministic: prefixes in name order, subjects grouped and all
/// triples sorted by (subject, predicate, object). Blank nodes keep their
/// labels, so re-reading the output yields an equal graph.
pub fn serialize_turtle(graph: &RdfGraph) -> String {
    let mut prefixes: BTreeMap<String, String> = WELL_KNOWN_PREFIXES
        .iter()
        .map(|&(p, ns)| (p.to_owned(), ns.to_owned()))
        .collect();
    for (p, ns) in graph.prefixes() {
        prefixes.insert(p.clone(), ns.as_str().to_owned());
    }

    let mut out = String::new();
    if let Some(base) = graph.base() {
        let _ = writeln!(out, "@base <{}> .", escape_iri(base.as_str()));
    }
    for (p, ns) in &prefixes {
        let _ = writeln!(out, "@prefix {p}: <{}> .", escape_iri(ns));
    }

    let mut triples: Vec<&Triple> = graph.iter().collect();
    triples.sort();
    let writer = TermWriter { prefixes: &prefixes };
    let mut i = 0;
    while i < triples.len() {
        let subject = &triples[i].subject;
        out.push('\n');
        out.push_str(&writer.term(subject));
        let mut first_pred = true;
        while i < triples.len() && &triples[i].subject == subject {
            let predicate = &triples[i].predicate;
            if !first_pred {
                out.push_str(" ;\n   ");
            }
            first_pred = false;
            out.push(' ');
            out.push_str(&writer.predicate(predicate));
            let mut first_obj = true;
            while i < triples.len() && &triples[i].subject == subject && &triples[i].predicate == predicate {
                out.push_str(if first_obj { " " } else { ", " });
                first_obj = false;
                out.push_str(&writer.term(&triples[i].object));
                i += 1;
            }
        }
        out.push_str(" .\n");
    }
    out
}

struct TermWriter<'a> {
    prefixes: &'a BTreeMap<String, String>,
}

impl TermWriter<'_> {
    fn predicate(&self, iri: &Iri) -> String {
        if *iri == vocab::rdf::type_() {
            "a".to_owned()
        } else {
            self.iri(iri)
        }
    }

    fn iri(&self, iri: &Iri) -> String {
        let value = iri.as_str();
        // longest matching namespace wins
        let best = self
            .prefixes
            .iter()
            .filter(|(_, ns)| value.starts_with(ns.as_str()))
            .max_by_key(|(_, ns)| ns.len());
        if let Some((p, ns)) = best {
            let local = &value[ns.len()..];
            if is_safe_local(local) {
                return format!("{p}:{local}");
            }
        }
        format!("<{}>", escape_iri(value))
    }

    fn term(&self, term: &Term) -> String {
        match term {
            Term::Iri(iri) => self.iri(iri),
            Term::BlankNode(label) => format!("_:{label}"),
            Term::Literal(lit) => self.literal(lit),
        }
    }

    fn literal(&self, lit: &Literal) -> String {
        let mut s = String::with_capacity(lit.lexical.len() + 2);
        s.push('"');
        for c in lit.lexical.chars() {
            match c {
                '"' => s.push_str("\\\""),
                '\\' => s.push_str("\\\\"),
                '\n' => s.push_str("\\n"),
                '\r' => s.push_str("\\r"),
                '\t' => s.push_str("\\t"),
                c if (c as u32) < 0x20 => {
                    let _ = write!(s, "\\u{:04X}", c as u32);
                }
                c => s.push(c),
            }
        }
        s.push('"');
        if let Some(lang) = &lit.lang {
            s.push('@');
            s.push_str(lang);
        } else if let Some(dt) = &lit.datatype {
            s.push_str("^^");
            s.push_str(&self.iri(dt));
        }
        s
    }
}

fn is_safe_local(local: &str) -> bool {
    let mut chars = local.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {
            chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        }
        Some(_) => false,
    }
}

fn escape_iri(value: &str) -> String {
    let mut s = String::with_capacity(value.len());
    for c in value.chars() {
        if c <= ' ' || "<>\"{}|^`\\".contains(c) {
            let _ = write!(s, "\\u{:04X}", c as u32);
        } else {
            s.push(c);
        }
    }
    s
}
