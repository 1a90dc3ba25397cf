//! IRIs of the RDF, RDFS, OWL and XSD terms the crate refers to.

use super::Iri;

pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const OWL: &str = "http://www.w3.org/2002/07/owl#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";

/// Prefixes every document may use without declaring them.
pub const WELL_KNOWN_PREFIXES: [(&str, &str); 4] =
    [("owl", OWL), ("rdf", RDF), ("rdfs", RDFS), ("xsd", XSD)];

fn known(ns: &str, local: &str) -> Iri {
    Iri::new(format!("{ns}{local}")).expect("vocabulary IRIs are absolute")
}

pub mod rdf {
    use super::*;
    pub fn type_() -> Iri {
        known(RDF, "type")
    }
    pub fn first() -> Iri {
        known(RDF, "first")
    }
    pub fn rest() -> Iri {
        known(RDF, "rest")
    }
    pub fn nil() -> Iri {
        known(RDF, "nil")
    }
    pub fn property() -> Iri {
        known(RDF, "Property")
    }
}

pub mod rdfs {
    use super::*;
    pub fn class() -> Iri {
        known(RDFS, "Class")
    }
    pub fn label() -> Iri {
        known(RDFS, "label")
    }
    pub fn comment() -> Iri {
        known(RDFS, "comment")
    }
    pub fn domain() -> Iri {
        known(RDFS, "domain")
    }
    pub fn range() -> Iri {
        known(RDFS, "range")
    }
    pub fn sub_class_of() -> Iri {
        known(RDFS, "subClassOf")
    }
    pub fn see_also() -> Iri {
        known(RDFS, "seeAlso")
    }
    pub fn is_defined_by() -> Iri {
        known(RDFS, "isDefinedBy")
    }
}

pub mod owl {
    use super::*;
    pub fn ontology() -> Iri {
        known(OWL, "Ontology")
    }
    pub fn class() -> Iri {
        known(OWL, "Class")
    }
    pub fn object_property() -> Iri {
        known(OWL, "ObjectProperty")
    }
    pub fn datatype_property() -> Iri {
        known(OWL, "DatatypeProperty")
    }
    pub fn symmetric_property() -> Iri {
        known(OWL, "SymmetricProperty")
    }
    pub fn annotation_property() -> Iri {
        known(OWL, "AnnotationProperty")
    }
    pub fn named_individual() -> Iri {
        known(OWL, "NamedIndividual")
    }
    pub fn disjoint_with() -> Iri {
        known(OWL, "disjointWith")
    }
    pub fn equivalent_class() -> Iri {
        known(OWL, "equivalentClass")
    }
    pub fn inverse_of() -> Iri {
        known(OWL, "inverseOf")
    }
    pub fn version_info() -> Iri {
        known(OWL, "versionInfo")
    }
}

pub mod xsd {
    use super::*;
    pub fn integer() -> Iri {
        known(XSD, "integer")
    }
    pub fn decimal() -> Iri {
        known(XSD, "decimal")
    }
    pub fn double() -> Iri {
        known(XSD, "double")
    }
    pub fn boolean() -> Iri {
        known(XSD, "boolean")
    }
}
