//! Turtle reader.
//!
//! Covers the subset used by hand-written OWL ontologies: `@prefix`/`@base`
//! and their SPARQL forms, prefixed names, IRI references, `a`, predicate and
//! object lists, blank-node property lists, collections, quoted and
//! long-quoted strings with language tags or datatypes, numeric and boolean
//! shorthand, and comments.

use std::collections::{BTreeMap, HashSet};

use super::model::has_scheme;
use super::vocab::{self, WELL_KNOWN_PREFIXES};
use super::{Iri, Literal, RdfError, RdfGraph, Term, Triple};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    IriRef(String),
    PName { prefix: String, local: String },
    Blank(String),
    At(String),
    Str(String),
    Integer(String),
    Decimal(String),
    Double(String),
    True,
    False,
    A,
    SparqlPrefix,
    SparqlBase,
    Dot,
    Semi,
    Comma,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Carets,
    Eof,
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
    offset: usize,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: Pos,
    text: String,
}

struct Lexer<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    idx: usize,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, chars: src.char_indices().collect(), idx: 0, line: 1, column: 1 }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.idx).map(|&(_, c)| c)
    }

    fn peek_at(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.idx + ahead).map(|&(_, c)| c)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.idx += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        match self.chars.get(self.idx) {
            Some(&(offset, _)) => Pos { line: self.line, column: self.column, offset },
            None => self.last_char_pos(),
        }
    }

    /// Position of the final character; used for errors at end of input so
    /// that every reported position lies inside the source.
    fn last_char_pos(&self) -> Pos {
        let Some(&(offset, _)) = self.chars.last() else {
            return Pos { line: 1, column: 1, offset: 0 };
        };
        let before = &self.src[..offset];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) + 1;
        Pos { line, column, offset }
    }

    fn error(&self, pos: Pos, token: impl Into<String>, message: impl Into<String>) -> RdfError {
        RdfError::Syntax {
            line: pos.line,
            column: pos.column,
            offset: pos.offset,
            token: token.into(),
            message: message.into(),
        }
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn tokenize(mut self) -> Result<Vec<Token>, RdfError> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            let pos = self.pos();
            let start = self.idx;
            let Some(c) = self.peek() else {
                out.push(Token { tok: Tok::Eof, pos: self.last_char_pos(), text: String::new() });
                return Ok(out);
            };
            let tok = match c {
                '<' => self.iri_ref(pos)?,
                '"' | '\'' => self.string(pos)?,
                '@' => {
                    self.bump();
                    let word = self.take_while(|c, _| c.is_ascii_alphanumeric() || c == '-');
                    if word.is_empty() {
                        return Err(self.error(pos, "@", "expected directive or language tag"));
                    }
                    Tok::At(word)
                }
                '_' if self.peek_at(1) == Some(':') => {
                    self.bump();
                    self.bump();
                    let label = self.name_chars();
                    if label.is_empty() {
                        return Err(self.error(pos, "_:", "empty blank node label"));
                    }
                    Tok::Blank(label)
                }
                '.' if self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) => self.number(),
                '0'..='9' => self.number(),
                '+' | '-' => {
                    let next = self.peek_at(1);
                    let digit_follows = next.is_some_and(|c| c.is_ascii_digit())
                        || (next == Some('.') && self.peek_at(2).is_some_and(|c| c.is_ascii_digit()));
                    if !digit_follows {
                        return Err(self.error(pos, c.to_string(), "sign without digits"));
                    }
                    self.number()
                }
                '.' => self.single(Tok::Dot),
                ';' => self.single(Tok::Semi),
                ',' => self.single(Tok::Comma),
                '[' => self.single(Tok::LBracket),
                ']' => self.single(Tok::RBracket),
                '(' => self.single(Tok::LParen),
                ')' => self.single(Tok::RParen),
                '^' => {
                    self.bump();
                    if self.peek() != Some('^') {
                        return Err(self.error(pos, "^", "expected '^^'"));
                    }
                    self.bump();
                    Tok::Carets
                }
                c if c == ':' || c.is_alphabetic() => self.name(pos)?,
                other => return Err(self.error(pos, other.to_string(), "unexpected character")),
            };
            let text: String = self.chars[start..self.idx].iter().map(|&(_, c)| c).collect();
            out.push(Token { tok, pos, text });
        }
    }

    fn single(&mut self, tok: Tok) -> Tok {
        self.bump();
        tok
    }

    fn take_while(&mut self, mut f: impl FnMut(char, Option<char>) -> bool) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if !f(c, self.peek_at(1)) {
                break;
            }
            s.push(c);
            self.bump();
        }
        s
    }

    /// Name characters, never ending in `.`.
    fn name_chars(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            let inner_dot =
                c == '.' && self.peek_at(1).is_some_and(|n| n.is_alphanumeric() || matches!(n, '_' | '-' | '%' | ':'));
            if c.is_alphanumeric() || matches!(c, '_' | '-' | '%' | '\u{B7}') || inner_dot {
                s.push(c);
                self.bump();
            } else if c == '\\' && self.peek_at(1).is_some_and(|n| "_~.-!$&'()*+,;=/?#@%".contains(n)) {
                self.bump();
                s.push(self.bump().unwrap_or_default());
            } else {
                break;
            }
        }
        s
    }

    fn name(&mut self, pos: Pos) -> Result<Tok, RdfError> {
        let prefix = if self.peek() == Some(':') {
            String::new()
        } else {
            self.take_while(|c, next| {
                c.is_alphanumeric()
                    || matches!(c, '_' | '-')
                    || (c == '.' && next.is_some_and(|n| n.is_alphanumeric() || matches!(n, '_' | '-')))
            })
        };
        if self.peek() == Some(':') {
            self.bump();
            let mut local = String::new();
            // local names may continue with ':' characters
            loop {
                local.push_str(&self.name_chars());
                if self.peek() == Some(':') {
                    local.push(':');
                    self.bump();
                } else {
                    break;
                }
            }
            return Ok(Tok::PName { prefix, local });
        }
        match prefix.as_str() {
            "a" => Ok(Tok::A),
            "true" => Ok(Tok::True),
            "false" => Ok(Tok::False),
            w if w.eq_ignore_ascii_case("prefix") => Ok(Tok::SparqlPrefix),
            w if w.eq_ignore_ascii_case("base") => Ok(Tok::SparqlBase),
            _ => Err(self.error(pos, prefix, "unknown keyword")),
        }
    }

    fn number(&mut self) -> Tok {
        let mut s = String::new();
        if let Some(c @ ('+' | '-')) = self.peek() {
            s.push(c);
            self.bump();
        }
        s.push_str(&self.take_while(|c, _| c.is_ascii_digit()));
        let mut decimal = false;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            decimal = true;
            s.push('.');
            self.bump();
            s.push_str(&self.take_while(|c, _| c.is_ascii_digit()));
        }
        if let Some(e @ ('e' | 'E')) = self.peek() {
            let sign = matches!(self.peek_at(1), Some('+' | '-'));
            let digit_at = if sign { 2 } else { 1 };
            if self.peek_at(digit_at).is_some_and(|c| c.is_ascii_digit()) {
                s.push(e);
                self.bump();
                if sign {
                    s.push(self.bump().unwrap_or_default());
                }
                s.push_str(&self.take_while(|c, _| c.is_ascii_digit()));
                return Tok::Double(s);
            }
        }
        if decimal {
            Tok::Decimal(s)
        } else {
            Tok::Integer(s)
        }
    }

    fn iri_ref(&mut self, pos: Pos) -> Result<Tok, RdfError> {
        self.bump();
        let mut s = String::new();
        loop {
            let here = self.pos();
            match self.bump() {
                None => return Err(self.error(pos, format!("<{s}"), "unterminated IRI")),
                Some('>') => return Ok(Tok::IriRef(s)),
                Some('\\') => match self.bump() {
                    Some('u') => s.push(self.hex_escape(4, here)?),
                    Some('U') => s.push(self.hex_escape(8, here)?),
                    _ => return Err(self.error(here, "\\", "invalid escape in IRI")),
                },
                Some(c) if c <= ' ' || "<\"{}|^`".contains(c) => {
                    return Err(self.error(here, c.to_string(), "character not allowed in IRI"));
                }
                Some(c) => s.push(c),
            }
        }
    }

    fn hex_escape(&mut self, len: usize, pos: Pos) -> Result<char, RdfError> {
        let mut hex = String::new();
        for _ in 0..len {
            match self.peek() {
                Some(c) if c.is_ascii_hexdigit() => {
                    hex.push(c);
                    self.bump();
                }
                _ => return Err(self.error(pos, format!("\\u{hex}"), "truncated unicode escape")),
            }
        }
        u32::from_str_radix(&hex, 16)
            .ok()
            .and_then(char::from_u32)
            .ok_or_else(|| self.error(pos, format!("\\u{hex}"), "invalid code point"))
    }

    fn string(&mut self, pos: Pos) -> Result<Tok, RdfError> {
        let quote = self.bump().unwrap_or('"');
        let long = self.peek() == Some(quote) && self.peek_at(1) == Some(quote);
        if long {
            self.bump();
            self.bump();
        }
        let mut s = String::new();
        loop {
            let here = self.pos();
            match self.bump() {
                None => return Err(self.error(pos, quote.to_string(), "unterminated string")),
                Some(c) if c == quote => {
                    if !long {
                        return Ok(Tok::Str(s));
                    }
                    if self.peek() == Some(quote) && self.peek_at(1) == Some(quote) {
                        self.bump();
                        self.bump();
                        // up to two extra quotes may precede the closing delimiter
                        while self.peek() == Some(quote) {
                            s.push(quote);
                            self.bump();
                        }
                        return Ok(Tok::Str(s));
                    }
                    s.push(c);
                }
                Some('\n' | '\r') if !long => {
                    return Err(self.error(here, "\\n", "newline in single-quoted string"));
                }
                Some('\\') => {
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex_escape(4, here)?,
                        Some('U') => self.hex_escape(8, here)?,
                        _ => return Err(self.error(here, "\\", "invalid string escape")),
                    };
                    s.push(c);
                }
                Some(c) => s.push(c),
            }
        }
    }
}

struct Parser {
    tokens: Vec<Token>,
    idx: usize,
    prefixes: BTreeMap<String, Iri>,
    declared: BTreeMap<String, Iri>,
    base: Option<Iri>,
    graph: RdfGraph,
    used_labels: HashSet<String>,
    fresh: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.idx.min(self.tokens.len() - 1)]
    }

    fn next(&mut self) -> Token {
        let t = self.peek().clone();
        if self.idx < self.tokens.len() - 1 {
            self.idx += 1;
        }
        t
    }

    fn error_at(&self, token: &Token, message: impl Into<String>) -> RdfError {
        let text = if token.tok == Tok::Eof { "end of input".to_owned() } else { token.text.clone() };
        RdfError::Syntax {
            line: token.pos.line,
            column: token.pos.column,
            offset: token.pos.offset,
            token: text,
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), RdfError> {
        let t = self.next();
        if t.tok == tok {
            Ok(())
        } else {
            Err(self.error_at(&t, format!("expected {what}")))
        }
    }

    fn fresh_blank(&mut self) -> Term {
        loop {
            let label = format!("b{}", self.fresh);
            self.fresh += 1;
            if self.used_labels.insert(label.clone()) {
                return Term::BlankNode(label);
            }
        }
    }

    fn resolve(&self, raw: &str, token: &Token) -> Result<Iri, RdfError> {
        if has_scheme(raw) {
            return Iri::new(raw).map_err(|e| self.error_at(token, e.to_string()));
        }
        let Some(base) = &self.base else {
            return Err(self.error_at(token, "relative IRI without a base"));
        };
        Iri::new(resolve_reference(base.as_str(), raw)).map_err(|e| self.error_at(token, e.to_string()))
    }

    fn parse(mut self) -> Result<RdfGraph, RdfError> {
        loop {
            let t = self.peek().clone();
            match &t.tok {
                Tok::Eof => break,
                Tok::At(word) if word == "prefix" => {
                    self.next();
                    self.prefix_decl()?;
                    self.expect(Tok::Dot, "'.' after @prefix")?;
                }
                Tok::At(word) if word == "base" => {
                    self.next();
                    self.base_decl()?;
                    self.expect(Tok::Dot, "'.' after @base")?;
                }
                Tok::SparqlPrefix => {
                    self.next();
                    self.prefix_decl()?;
                }
                Tok::SparqlBase => {
                    self.next();
                    self.base_decl()?;
                }
                _ => {
                    self.triples()?;
                    self.expect(Tok::Dot, "'.' at end of statement")?;
                }
            }
        }
        let mut graph = self.graph;
        for (prefix, iri) in self.declared {
            graph.add_prefix(prefix, iri);
        }
        graph.set_base(self.base);
        Ok(graph)
    }

    fn prefix_decl(&mut self) -> Result<(), RdfError> {
        let t = self.next();
        let Tok::PName { prefix, local } = &t.tok else {
            return Err(self.error_at(&t, "expected prefix name"));
        };
        if !local.is_empty() {
            return Err(self.error_at(&t, "prefix name must end with ':'"));
        }
        let iri_tok = self.next();
        let Tok::IriRef(raw) = &iri_tok.tok else {
            return Err(self.error_at(&iri_tok, "expected IRI after prefix name"));
        };
        let iri = self.resolve(raw, &iri_tok)?;
        self.prefixes.insert(prefix.clone(), iri.clone());
        self.declared.insert(prefix.clone(), iri);
        Ok(())
    }

    fn base_decl(&mut self) -> Result<(), RdfError> {
        let t = self.next();
        let Tok::IriRef(raw) = &t.tok else {
            return Err(self.error_at(&t, "expected IRI after base"));
        };
        self.base = Some(self.resolve(raw, &t)?);
        Ok(())
    }

    fn triples(&mut self) -> Result<(), RdfError> {
        if self.peek().tok == Tok::LBracket {
            let subject = self.blank_property_list()?;
            if !matches!(self.peek().tok, Tok::Dot) {
                self.predicate_object_list(&subject)?;
            }
            return Ok(());
        }
        let subject = self.subject()?;
        self.predicate_object_list(&subject)
    }

    fn subject(&mut self) -> Result<Term, RdfError> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::IriRef(_) | Tok::PName { .. } => Ok(Term::Iri(self.iri()?)),
            Tok::Blank(label) => {
                self.next();
                Ok(Term::BlankNode(label.clone()))
            }
            Tok::LParen => self.collection(),
            _ => Err(self.error_at(&t, "expected subject")),
        }
    }

    fn iri(&mut self) -> Result<Iri, RdfError> {
        let t = self.next();
        match &t.tok {
            Tok::IriRef(raw) => self.resolve(raw, &t),
            Tok::PName { prefix, local } => {
                let Some(ns) = self.prefixes.get(prefix) else {
                    return Err(RdfError::UnresolvedPrefix {
                        prefix: prefix.clone(),
                        line: t.pos.line,
                        column: t.pos.column,
                    });
                };
                Iri::new(format!("{ns}{local}")).map_err(|e| self.error_at(&t, e.to_string()))
            }
            _ => Err(self.error_at(&t, "expected IRI")),
        }
    }

    fn predicate_object_list(&mut self, subject: &Term) -> Result<(), RdfError> {
        loop {
            let predicate = self.verb()?;
            self.object_list(subject, &predicate)?;
            if self.peek().tok != Tok::Semi {
                return Ok(());
            }
            while self.peek().tok == Tok::Semi {
                self.next();
            }
            if matches!(self.peek().tok, Tok::Dot | Tok::RBracket) {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> Result<Iri, RdfError> {
        if self.peek().tok == Tok::A {
            self.next();
            return Ok(vocab::rdf::type_());
        }
        let t = self.peek().clone();
        match t.tok {
            Tok::IriRef(_) | Tok::PName { .. } => self.iri(),
            _ => Err(self.error_at(&t, "expected predicate")),
        }
    }

    fn object_list(&mut self, subject: &Term, predicate: &Iri) -> Result<(), RdfError> {
        loop {
            let object = self.object()?;
            self.graph.insert(Triple { subject: subject.clone(), predicate: predicate.clone(), object });
            if self.peek().tok != Tok::Comma {
                return Ok(());
            }
            self.next();
        }
    }

    fn object(&mut self) -> Result<Term, RdfError> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::IriRef(_) | Tok::PName { .. } => Ok(Term::Iri(self.iri()?)),
            Tok::Blank(label) => {
                self.next();
                Ok(Term::BlankNode(label.clone()))
            }
            Tok::LBracket => self.blank_property_list(),
            Tok::LParen => self.collection(),
            Tok::Str(_) | Tok::Integer(_) | Tok::Decimal(_) | Tok::Double(_) | Tok::True | Tok::False => {
                Ok(Term::Literal(self.literal()?))
            }
            _ => Err(self.error_at(&t, "expected object")),
        }
    }

    fn literal(&mut self) -> Result<Literal, RdfError> {
        let t = self.next();
        Ok(match t.tok {
            Tok::Integer(s) => Literal::typed(s, vocab::xsd::integer()),
            Tok::Decimal(s) => Literal::typed(s, vocab::xsd::decimal()),
            Tok::Double(s) => Literal::typed(s, vocab::xsd::double()),
            Tok::True => Literal::typed("true", vocab::xsd::boolean()),
            Tok::False => Literal::typed("false", vocab::xsd::boolean()),
            Tok::Str(s) => match self.peek().tok.clone() {
                Tok::At(lang) => {
                    self.next();
                    Literal::lang_string(s, lang)
                }
                Tok::Carets => {
                    self.next();
                    let dt = self.iri()?;
                    Literal::typed(s, dt)
                }
                _ => Literal::simple(s),
            },
            _ => return Err(self.error_at(&t, "expected literal")),
        })
    }

    fn blank_property_list(&mut self) -> Result<Term, RdfError> {
        self.expect(Tok::LBracket, "'['")?;
        let node = self.fresh_blank();
        if self.peek().tok != Tok::RBracket {
            self.predicate_object_list(&node)?;
        }
        self.expect(Tok::RBracket, "']'")?;
        Ok(node)
    }

    fn collection(&mut self) -> Result<Term, RdfError> {
        self.expect(Tok::LParen, "'('")?;
        let mut items = Vec::new();
        while self.peek().tok != Tok::RParen {
            if self.peek().tok == Tok::Eof {
                let t = self.peek().clone();
                return Err(self.error_at(&t, "unterminated collection"));
            }
            items.push(self.object()?);
        }
        self.next();
        if items.is_empty() {
            return Ok(Term::Iri(vocab::rdf::nil()));
        }
        let nodes: Vec<Term> = items.iter().map(|_| self.fresh_blank()).collect();
        for (i, item) in items.into_iter().enumerate() {
            self.graph.insert(Triple { subject: nodes[i].clone(), predicate: vocab::rdf::first(), object: item });
            let rest = nodes.get(i + 1).cloned().unwrap_or(Term::Iri(vocab::rdf::nil()));
            self.graph.insert(Triple { subject: nodes[i].clone(), predicate: vocab::rdf::rest(), object: rest });
        }
        Ok(nodes[0].clone())
    }
}

/// Resolves a relative reference against an absolute base (RFC 3986, without
/// dot-segment normalisation).
pub(crate) fn resolve_reference(base: &str, reference: &str) -> String {
    let without_fragment = base.split('#').next().unwrap_or(base);
    if reference.is_empty() {
        return without_fragment.to_owned();
    }
    if reference.starts_with('#') {
        return format!("{without_fragment}{reference}");
    }
    let scheme_end = base.find(':').map(|i| i + 1).unwrap_or(0);
    if let Some(rest) = reference.strip_prefix("//") {
        return format!("{}//{rest}", &base[..scheme_end]);
    }
    let after_scheme = &base[scheme_end..];
    let authority_end = if let Some(auth) = after_scheme.strip_prefix("//") {
        scheme_end + 2 + auth.find('/').unwrap_or(auth.len())
    } else {
        scheme_end
    };
    if reference.starts_with('/') {
        return format!("{}{reference}", &base[..authority_end]);
    }
    let path_part = without_fragment.split('?').next().unwrap_or(without_fragment);
    match path_part[authority_end..].rfind('/') {
        Some(i) => format!("{}{reference}", &path_part[..authority_end + i + 1]),
        None if authority_end > scheme_end => format!("{}/{reference}", &path_part[..authority_end]),
        None => format!("{}{reference}", &base[..scheme_end]),
    }
}

/// Parses a Turtle document into a graph.
///
/// Well-known prefixes (`rdf`, `rdfs`, `owl`, `xsd`) are available without a
/// declaration. Explicit blank-node labels are kept; anonymous nodes get
/// fresh labels that never clash with them.
pub fn parse_turtle(source: &str, base: Option<&Iri>) -> Result<RdfGraph, RdfError> {
    let tokens = Lexer::new(source).tokenize()?;
    let used_labels = tokens
        .iter()
        .filter_map(|t| match &t.tok {
            Tok::Blank(label) => Some(label.clone()),
            _ => None,
        })
        .collect();
    let prefixes = WELL_KNOWN_PREFIXES
        .iter()
        .map(|&(p, ns)| (p.to_owned(), Iri::new(ns).expect("well-known namespace")))
        .collect();
    Parser {
        tokens,
        idx: 0,
        prefixes,
        declared: BTreeMap::new(),
        base: base.cloned(),
        graph: RdfGraph::new(),
        used_labels,
        fresh: 0,
    }
    .parse()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    fn syntax_pos(err: RdfError) -> (usize, usize) {
        match err {
            RdfError::Syntax { line, column, .. } => (line, column),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_document() {
        let g = parse_turtle("@prefix ex: <http://e/> . ex:a ex:p ex:b .", None).unwrap();
        assert_eq!(g.len(), 1);
        let t = g.iter().next().unwrap();
        assert_eq!(t.subject, Term::Iri(iri("http://e/a")));
        assert_eq!(t.predicate, iri("http://e/p"));
        assert_eq!(t.object, Term::Iri(iri("http://e/b")));
    }

    #[test]
    fn sparql_style_directives_and_base() {
        let src = "BASE <http://e/dir/>\nPREFIX ex: <ns#>\n<a> ex:p <../b>, <#c> .";
        let g = parse_turtle(src, None).unwrap();
        let objects: Vec<_> = g.iter().map(|t| t.object.clone()).collect();
        assert_eq!(g.iter().next().unwrap().predicate, iri("http://e/dir/ns#p"));
        assert_eq!(objects[0], Term::Iri(iri("http://e/dir/../b")));
        assert_eq!(objects[1], Term::Iri(iri("http://e/dir/#c")));
    }

    #[test]
    fn collection_expands_to_four_triples() {
        let g = parse_turtle("@prefix : <http://e/> . ( :a :b ) :p :o .", None).unwrap();
        // two first/rest pairs plus the statement itself
        assert_eq!(g.len(), 5);
        let firsts = g.query(None, Some(&vocab::rdf::first()), None);
        let rests = g.query(None, Some(&vocab::rdf::rest()), None);
        assert_eq!(firsts.len() + rests.len(), 4);
        assert!(rests.iter().any(|t| t.object == Term::Iri(vocab::rdf::nil())));
    }

    #[test]
    fn literals_of_every_shape() {
        let src = r#"@prefix : <http://e/> .
            :s :p "plain", 'single', """long "quoted"
text""", "chat"@fr, "5"^^xsd:integer, 42, -3.5, 1e3, true, false, "esc\té" ."#;
        let g = parse_turtle(src, None).unwrap();
        let lits: Vec<Literal> = g.iter().filter_map(|t| t.object.as_literal().cloned()).collect();
        assert_eq!(lits.len(), 11);
        assert_eq!(lits[2].lexical, "long \"quoted\"\ntext");
        assert_eq!(lits[3].lang.as_deref(), Some("fr"));
        assert_eq!(lits[4].datatype, Some(vocab::xsd::integer()));
        assert_eq!(lits[5], Literal::typed("42", vocab::xsd::integer()));
        assert_eq!(lits[6], Literal::typed("-3.5", vocab::xsd::decimal()));
        assert_eq!(lits[7], Literal::typed("1e3", vocab::xsd::double()));
        assert_eq!(lits[8], Literal::typed("true", vocab::xsd::boolean()));
        assert_eq!(lits[10].lexical, "esc\t\u{e9}");
    }

    #[test]
    fn blank_node_property_lists() {
        let src = "@prefix : <http://e/> . :a :p [ :q :r ; :s [ ] ] . [ :x :y ] .";
        let g = parse_turtle(src, None).unwrap();
        assert_eq!(g.len(), 4);
        let blanks: HashSet<_> = g
            .iter()
            .flat_map(|t| [&t.subject, &t.object])
            .filter(|t| matches!(t, Term::BlankNode(_)))
            .collect();
        assert_eq!(blanks.len(), 3);
    }

    #[test]
    fn generated_labels_avoid_explicit_ones() {
        let g = parse_turtle("@prefix : <http://e/> . _:b0 :p [ :q 1 ] .", None).unwrap();
        let labels: HashSet<_> = g
            .iter()
            .flat_map(|t| [&t.subject, &t.object])
            .filter_map(|t| match t {
                Term::BlankNode(l) => Some(l.clone()),
                _ => None,
            })
            .collect();
        assert_eq!(labels.len(), 2);
    }

    #[test]
    fn trailing_semicolons_and_dotted_local_names() {
        let src = "@prefix : <http://e/> . :a.b :p :c ; ; .";
        let g = parse_turtle(src, None).unwrap();
        assert_eq!(g.iter().next().unwrap().subject, Term::Iri(iri("http://e/a.b")));
        assert_eq!(g.iter().next().unwrap().object, Term::Iri(iri("http://e/c")));
    }

    #[test]
    fn unresolved_prefix_is_named() {
        match parse_turtle("nope:a nope:b nope:c .", None) {
            Err(RdfError::UnresolvedPrefix { prefix, line, column }) => {
                assert_eq!(prefix, "nope");
                assert_eq!((line, column), (1, 1));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_turtle("@prefix : <http://e/> .\n:a :b .", None).unwrap_err();
        assert_eq!(syntax_pos(err), (2, 7));
        let err = parse_turtle("@prefix : <http://e/> .\n:a :b :c", None).unwrap_err();
        let (line, _) = syntax_pos(err);
        assert_eq!(line, 2);
        let err = parse_turtle("<rel> <http://e/p> <http://e/o> .", None).unwrap_err();
        assert_eq!(syntax_pos(err), (1, 1));
    }

    #[test]
    fn well_known_prefixes_need_no_declaration() {
        let g = parse_turtle("<http://e/C> a owl:Class ; rdfs:label \"C\" .", None).unwrap();
        assert_eq!(g.len(), 2);
        assert!(g.prefixes().is_empty());
    }

    #[test]
    fn reference_resolution() {
        assert_eq!(resolve_reference("http://e/a/b?q#f", "c"), "http://e/a/c");
        assert_eq!(resolve_reference("http://e/a/b", "/c"), "http://e/c");
        assert_eq!(resolve_reference("http://e/a/b", "//x/y"), "http://x/y");
        assert_eq!(resolve_reference("http://e/a/b#f", "#g"), "http://e/a/b#g");
        assert_eq!(resolve_reference("http://e", "c"), "http://e/c");
    }
}
