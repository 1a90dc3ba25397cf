//! In-memory RDF graphs with a Turtle reader and writer.

mod model;
mod turtle;
pub mod vocab;
mod write;

use thiserror::Error;

pub use model::{Iri, Literal, RdfGraph, Term, Triple};
pub use turtle::parse_turtle;
pub use write::serialize_turtle;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RdfError {
    #[error("syntax error at line {line}, column {column} near `{token}`: {message}")]
    Syntax { line: usize, column: usize, offset: usize, token: String, message: String },
    #[error("unresolved prefix `{prefix}:` at line {line}, column {column}")]
    UnresolvedPrefix { prefix: String, line: usize, column: usize },
    #[error("invalid IRI `{value}`: {reason}")]
    InvalidIri { value: String, reason: &'static str },
}

impl RdfError {
    /// 1-based (line, column) of the error, if it has one.
    pub fn position(&self) -> Option<(usize, usize)> {
        match self {
            RdfError::Syntax { line, column, .. } | RdfError::UnresolvedPrefix { line, column, .. } => {
                Some((*line, *column))
            }
            RdfError::InvalidIri { .. } => None,
        }
    }
}
