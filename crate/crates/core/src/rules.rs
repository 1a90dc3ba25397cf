//! The rule language: keywords, the rule AST, a parser and printer for the
//! one-line text form, and rule-pack files.
//!
//! A rule is a subject keyword followed by clause sequences joined by
//! operator expressions:
//!
//! ```text
//! Property hasRelatedElement Domain usesLogicalOperator And hasRelatedElement Range
//! ```
//!
//! Keywords match case-insensitively. `usesLogicalOperator Not` directly
//! after the subject negates the first sequence; elsewhere `A Not B` reads
//! as "A and not B". Chains associate left to right.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::onto::ElementKind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("empty rule")]
    Empty,
    #[error("unknown keyword `{token}` at token {position}")]
    UnknownKeyword { position: usize, token: String },
    #[error("`{argument}` is not a valid argument of `{predicate}`")]
    InvalidPair { predicate: String, argument: String },
    #[error("`{predicate}` at token {position} needs an argument")]
    MissingArgument { position: usize, predicate: String },
    #[error("functional clause at token {position} must end its clause sequence")]
    NonTerminalFunctionalClause { position: usize },
    #[error("operator at token {position} is not followed by a clause sequence")]
    DanglingOperator { position: usize },
    #[error("invalid comparison: {0}")]
    InvalidComparison(String),
    #[error("line {line}: expected `rule <id> [priority <Low|Medium|High>]: <rule>`")]
    MalformedLine { line: usize },
    #[error("rule `{id}` (line {line}): {source}")]
    InRule {
        id: String,
        line: usize,
        #[source]
        source: Box<RuleError>,
    },
    #[error("duplicate rule id `{id}` at line {line}")]
    DuplicateRuleId { id: String, line: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
pub enum Priority {
    Low,
    #[default]
    Medium,
    High,
}

impl Priority {
    pub const ALL: [Priority; 3] = [Priority::Low, Priority::Medium, Priority::High];

    pub fn parse(s: &str) -> Option<Priority> {
        Priority::ALL.into_iter().find(|p| p.as_str().eq_ignore_ascii_case(s))
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Priority::Low => "Low",
            Priority::Medium => "Medium",
            Priority::High => "High",
        }
    }
}

impl fmt::Display for Priority {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

macro_rules! keyword_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $kw:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn keyword(self) -> &'static str {
                match self {
                    $($name::$variant => $kw),+
                }
            }

            pub fn from_keyword(token: &str) -> Option<Self> {
                Self::ALL.iter().copied().find(|v| v.keyword().eq_ignore_ascii_case(token))
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.keyword())
            }
        }
    };
}

keyword_enum! {
    /// Objects of `hasRelatedElement`.
    RelatedObject {
        Domain => "Domain",
        Range => "Range",
        Subclass => "Subclass",
        Superclass => "Superclass",
        DisjointClass => "DisjointClass",
        EquivalentClass => "EquivalentClass",
        InverseProperty => "InverseProperty",
        Label => "Label",
        Comment => "Comment",
        Annotation => "Annotation",
    }
}

keyword_enum! {
    /// Objects of `hasAttribute`.
    Attribute {
        Id => "ID",
        Language => "Language",
        Namespace => "Namespace",
    }
}

keyword_enum! {
    /// Functions of `hasOntologicalProperty`.
    OntologicalFunction {
        IdConsistency => "IDConsistency",
        Uniqueness => "Uniqueness",
        TextValidity => "TextValidity",
    }
}

keyword_enum! {
    /// Functions of `hasLinguisticProperty`.
    LinguisticFunction {
        ContainsPolysemes => "ContainsPolysemes",
        ContainsConjunctions => "ContainsConjunctions",
    }
}

keyword_enum! {
    Operator {
        And => "And",
        Or => "Or",
        Not => "Not",
        Equality => "Equality",
        Inverse => "Inverse",
        Synonymy => "Synonymy",
        Dissimilarity => "Dissimilarity",
    }
}

keyword_enum! {
    /// Predicate keywords of clauses and operator expressions.
    Predicate {
        HasRelatedElement => "hasRelatedElement",
        HasAttribute => "hasAttribute",
        HasOntologicalProperty => "hasOntologicalProperty",
        HasLinguisticProperty => "hasLinguisticProperty",
        UsesLogicalOperator => "usesLogicalOperator",
        UsesComparativeOperator => "usesComparativeOperator",
    }
}

impl Operator {
    pub fn is_logical(self) -> bool {
        matches!(self, Operator::And | Operator::Or | Operator::Not)
    }

    pub fn predicate(self) -> Predicate {
        if self.is_logical() {
            Predicate::UsesLogicalOperator
        } else {
            Predicate::UsesComparativeOperator
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Clause {
    RelatedElement(RelatedObject),
    Attribute(Attribute),
    Ontological(OntologicalFunction),
    Linguistic(LinguisticFunction),
}

impl Clause {
    pub fn is_functional(self) -> bool {
        matches!(self, Clause::Ontological(_) | Clause::Linguistic(_))
    }

    pub fn predicate(self) -> Predicate {
        match self {
            Clause::RelatedElement(_) => Predicate::HasRelatedElement,
            Clause::Attribute(_) => Predicate::HasAttribute,
            Clause::Ontological(_) => Predicate::HasOntologicalProperty,
            Clause::Linguistic(_) => Predicate::HasLinguisticProperty,
        }
    }

    pub fn argument(self) -> &'static str {
        match self {
            Clause::RelatedElement(o) => o.keyword(),
            Clause::Attribute(a) => a.keyword(),
            Clause::Ontological(f) => f.keyword(),
            Clause::Linguistic(f) => f.keyword(),
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.predicate(), self.argument())
    }
}

pub type ClauseSequence = Vec<Clause>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub id: String,
    pub priority: Priority,
    pub subject: ElementKind,
    /// Leading `usesLogicalOperator Not`.
    pub head_negated: bool,
    pub head: ClauseSequence,
    pub tail: Vec<(Operator, ClauseSequence)>,
}

impl Rule {
    /// The comparative operator, if the rule is a comparison.
    pub fn comparison(&self) -> Option<Operator> {
        match self.tail.as_slice() {
            [(op, _)] if !op.is_logical() => Some(*op),
            _ => None,
        }
    }

    /// Checks the structural constraints the type system does not encode.
    pub fn validate(&self) -> Result<(), RuleError> {
        let mut position = 1 + 2 * usize::from(self.head_negated);
        for seq in std::iter::once(&self.head).chain(self.tail.iter().map(|(_, s)| s)) {
            if seq.is_empty() {
                return Err(RuleError::DanglingOperator { position: position.saturating_sub(2) });
            }
            if let Some(i) = seq[..seq.len() - 1].iter().position(|c| c.is_functional()) {
                return Err(RuleError::NonTerminalFunctionalClause { position: position + 2 * i });
            }
            position += 2 * seq.len() + 2;
        }
        let comparatives = self.tail.iter().filter(|(op, _)| !op.is_logical()).count();
        if comparatives > 0 {
            if self.tail.len() != 1 || self.head_negated {
                return Err(RuleError::InvalidComparison(
                    "a comparative operator must join exactly two clause sequences".into(),
                ));
            }
            let all_extractive =
                self.head.iter().chain(&self.tail[0].1).all(|c| !c.is_functional());
            if !all_extractive {
                return Err(RuleError::InvalidComparison(
                    "compared clause sequences must be extractive only".into(),
                ));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_rule(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RulePack {
    pub name: String,
    pub rules: Vec<Rule>,
}

impl RulePack {
    pub fn get(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }
}

/// Parses the body of a rule. The returned rule has an empty id and
/// Medium priority.
pub fn parse_rule(text: &str) -> Result<Rule, RuleError> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let Some(&first) = tokens.first() else {
        return Err(RuleError::Empty);
    };
    let subject = ElementKind::ALL
        .into_iter()
        .find(|k| k.keyword().eq_ignore_ascii_case(first))
        .ok_or_else(|| RuleError::UnknownKeyword { position: 0, token: first.to_owned() })?;

    let mut head_negated = false;
    let mut head = Vec::new();
    let mut tail: Vec<(Operator, ClauseSequence)> = Vec::new();
    let mut pending_op: Option<(Operator, usize)> = None;
    let mut i = 1;
    while i < tokens.len() {
        let token = tokens[i];
        let predicate = Predicate::from_keyword(token)
            .ok_or_else(|| RuleError::UnknownKeyword { position: i, token: token.to_owned() })?;
        let argument = *tokens
            .get(i + 1)
            .ok_or_else(|| RuleError::MissingArgument { position: i, predicate: predicate.keyword().into() })?;
        let current = tail.last_mut().map_or(&mut head, |(_, s)| s);
        match predicate {
            Predicate::UsesLogicalOperator | Predicate::UsesComparativeOperator => {
                let op = parse_operator(predicate, argument, i + 1)?;
                let at_start = i == 1;
                if at_start && op == Operator::Not {
                    head_negated = true;
                } else if pending_op.is_some() || current.is_empty() {
                    return Err(RuleError::DanglingOperator { position: i });
                } else {
                    pending_op = Some((op, i));
                }
            }
            _ => {
                let clause = parse_clause(predicate, argument, i + 1)?;
                if let Some((op, _)) = pending_op.take() {
                    tail.push((op, vec![clause]));
                } else {
                    if current.last().is_some_and(|c| c.is_functional()) {
                        return Err(RuleError::NonTerminalFunctionalClause { position: i - 2 });
                    }
                    current.push(clause);
                }
            }
        }
        i += 2;
    }
    if let Some((_, position)) = pending_op {
        return Err(RuleError::DanglingOperator { position });
    }
    if head.is_empty() {
        return Err(RuleError::DanglingOperator { position: 1 });
    }
    let rule = Rule { id: String::new(), priority: Priority::Medium, subject, head_negated, head, tail };
    rule.validate()?;
    Ok(rule)
}

fn is_any_argument(token: &str) -> bool {
    RelatedObject::from_keyword(token).is_some()
        || Attribute::from_keyword(token).is_some()
        || OntologicalFunction::from_keyword(token).is_some()
        || LinguisticFunction::from_keyword(token).is_some()
        || Operator::from_keyword(token).is_some()
}

fn pair_error(predicate: Predicate, argument: &str, position: usize) -> RuleError {
    if is_any_argument(argument) {
        RuleError::InvalidPair { predicate: predicate.keyword().into(), argument: argument.into() }
    } else {
        RuleError::UnknownKeyword { position, token: argument.into() }
    }
}

fn parse_clause(predicate: Predicate, argument: &str, position: usize) -> Result<Clause, RuleError> {
    let clause = match predicate {
        Predicate::HasRelatedElement => RelatedObject::from_keyword(argument).map(Clause::RelatedElement),
        Predicate::HasAttribute => Attribute::from_keyword(argument).map(Clause::Attribute),
        Predicate::HasOntologicalProperty => OntologicalFunction::from_keyword(argument).map(Clause::Ontological),
        Predicate::HasLinguisticProperty => LinguisticFunction::from_keyword(argument).map(Clause::Linguistic),
        Predicate::UsesLogicalOperator | Predicate::UsesComparativeOperator => None,
    };
    clause.ok_or_else(|| pair_error(predicate, argument, position))
}

fn parse_operator(predicate: Predicate, argument: &str, position: usize) -> Result<Operator, RuleError> {
    Operator::from_keyword(argument)
        .filter(|op| op.predicate() == predicate)
        .ok_or_else(|| pair_error(predicate, argument, position))
}

/// Canonical one-line text of a rule body (without id or priority).
pub fn print_rule(rule: &Rule) -> String {
    let mut parts: Vec<String> = vec![rule.subject.keyword().to_owned()];
    if rule.head_negated {
        parts.push(format!("{} {}", Predicate::UsesLogicalOperator, Operator::Not));
    }
    parts.extend(rule.head.iter().map(Clause::to_string));
    for (op, seq) in &rule.tail {
        parts.push(format!("{} {}", op.predicate(), op));
        parts.extend(seq.iter().map(Clause::to_string));
    }
    parts.join(" ")
}

/// Parses a rule-pack file: an optional `pack <name>` header, then lines of
/// the form `rule <id> [priority <Low|Medium|High>]: <rule>`. `#` starts a
/// comment line; blank lines are skipped.
pub fn load_rule_pack(source: &str) -> Result<RulePack, RuleError> {
    let mut pack = RulePack { name: "rules".into(), rules: Vec::new() };
    let mut seen = HashSet::new();
    for (n, raw) in source.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix("pack ") {
            if pack.rules.is_empty() {
                pack.name = name.trim().to_owned();
                continue;
            }
        }
        let malformed = || RuleError::MalformedLine { line: line_no };
        let (header, body) = line.split_once(':').ok_or_else(malformed)?;
        let header: Vec<&str> = header.split_whitespace().collect();
        let (id, priority) = match header.as_slice() {
            ["rule", id] => (*id, Priority::Medium),
            ["rule", id, "priority", p] => (*id, Priority::parse(p).ok_or_else(malformed)?),
            _ => return Err(malformed()),
        };
        let mut rule = parse_rule(body).map_err(|e| RuleError::InRule {
            id: id.to_owned(),
            line: line_no,
            source: Box::new(e),
        })?;
        if !seen.insert(id.to_owned()) {
            return Err(RuleError::DuplicateRuleId { id: id.to_owned(), line: line_no });
        }
        rule.id = id.to_owned();
        rule.priority = priority;
        pack.rules.push(rule);
    }
    Ok(pack)
}

/// Writes a pack in the format read by [`load_rule_pack`].
pub fn print_rule_pack(pack: &RulePack) -> String {
    let mut out = format!("pack {}\n", pack.name);
    for rule in &pack.rules {
        out.push_str(&format!("rule {} priority {}: {}\n", rule.id, rule.priority, print_rule(rule)));
    }
    out
}

const DEFAULT_PACK: &str = include_str!("../resources/default.rules");

/// The rule pack shipped with the crate.
pub fn default_pack() -> RulePack {
    load_rule_pack(DEFAULT_PACK).expect("bundled rule pack is valid")
}

pub fn default_pack_source() -> &'static str {
    DEFAULT_PACK
}
