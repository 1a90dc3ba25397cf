//! Ontology quality evaluation: a rule engine for syntactic checks over OWL
//! ontologies and an expertise-weighted voting pipeline for crowd validation
//! of enriched elements.

pub mod engine;
pub mod lexicon;
pub mod onto;
pub mod rdf;
pub mod rules;
pub mod expertise;
pub mod regress;
pub mod validation;
pub mod synthetic;
