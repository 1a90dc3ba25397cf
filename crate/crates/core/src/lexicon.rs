//! Text utilities behind the linguistic functions and comparative operators:
//! identifier tokenization, conjunction and polysemy checks, text validity,
//! naming-convention consistency, and text embeddings.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LexiconError {
    #[error("lexicon file not found: {0}")]
    MissingLexicon(String),
    #[error("invalid lexicon: {0}")]
    InvalidLexicon(String),
    #[error("vector dimensions differ: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("no stored embedding for text {0:?}")]
    UnknownText(String),
    #[error("invalid embedding fixture: {0}")]
    InvalidFixture(String),
}

/// Lowercase word tokens.
pub type TokenList = Vec<String>;

pub const DEFAULT_CONJUNCTIONS: [&str; 5] = ["and", "or", "nor", "&", "/"];

#[derive(Clone, Copy, PartialEq)]
enum CharClass {
    Upper,
    Lower,
    Digit,
    Symbol,
    Separator,
}

fn class_of(c: char) -> CharClass {
    if c.is_uppercase() {
        CharClass::Upper
    } else if c.is_alphabetic() {
        CharClass::Lower
    } else if c.is_ascii_digit() {
        CharClass::Digit
    } else if c == '&' || c == '/' {
        CharClass::Symbol
    } else {
        CharClass::Separator
    }
}

/// Splits an identifier or label into lowercase tokens at camelCase
/// boundaries, underscores, hyphens, whitespace and letter/digit changes.
/// `&` and `/` become tokens of their own.
pub fn tokenize_identifier(id: &str) -> TokenList {
    let chars: Vec<char> = id.chars().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    let flush = |current: &mut String, tokens: &mut Vec<String>| {
        if !current.is_empty() {
            tokens.push(current.to_lowercase());
            current.clear();
        }
    };
    for (i, &c) in chars.iter().enumerate() {
        let class = class_of(c);
        let prev = i.checked_sub(1).map(|j| class_of(chars[j]));
        let next = chars.get(i + 1).map(|&n| class_of(n));
        match class {
            CharClass::Separator => flush(&mut current, &mut tokens),
            CharClass::Symbol => {
                flush(&mut current, &mut tokens);
                tokens.push(c.to_string());
            }
            _ => {
                let boundary = match (prev, class) {
                    (Some(CharClass::Lower), CharClass::Upper) => true,
                    // "HTTPServer": the last capital starts the next word
                    (Some(CharClass::Upper), CharClass::Upper) => next == Some(CharClass::Lower),
                    (Some(CharClass::Digit), CharClass::Upper | CharClass::Lower) => true,
                    (Some(CharClass::Upper | CharClass::Lower), CharClass::Digit) => true,
                    _ => false,
                };
                if boundary {
                    flush(&mut current, &mut tokens);
                }
                current.push(c);
            }
        }
    }
    flush(&mut current, &mut tokens);
    tokens
}

pub fn contains_conjunctions(text: &str) -> bool {
    contains_any_token(text, &DEFAULT_CONJUNCTIONS)
}

/// True iff some token of `text` is in `words`.
pub fn contains_any_token<S: AsRef<str>>(text: &str, words: &[S]) -> bool {
    tokenize_identifier(text).iter().any(|t| words.iter().any(|w| w.as_ref() == t))
}

/// Word to number of senses. Words absent from the table have one sense.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SenseLexicon {
    senses: BTreeMap<String, u32>,
}

const BUNDLED_LEXICON: &str = include_str!("../resources/lexicon.json");

impl SenseLexicon {
    pub fn from_json(text: &str) -> Result<Self, LexiconError> {
        let raw: BTreeMap<String, u32> =
            serde_json::from_str(text).map_err(|e| LexiconError::InvalidLexicon(e.to_string()))?;
        if let Some((word, _)) = raw.iter().find(|(_, &n)| n == 0) {
            return Err(LexiconError::InvalidLexicon(format!("`{word}` has zero senses")));
        }
        Ok(SenseLexicon { senses: raw.into_iter().map(|(w, n)| (w.to_lowercase(), n)).collect() })
    }

    pub fn load(path: &Path) -> Result<Self, LexiconError> {
        let text = std::fs::read_to_string(path)
            .map_err(|_| LexiconError::MissingLexicon(path.display().to_string()))?;
        Self::from_json(&text)
    }

    /// The small sense inventory shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_LEXICON).expect("bundled lexicon is valid")
    }

    pub fn sense_count(&self, word: &str) -> u32 {
        self.senses.get(&word.to_lowercase()).copied().unwrap_or(1)
    }

    pub fn words(&self) -> impl Iterator<Item = (&str, u32)> {
        self.senses.iter().map(|(w, &n)| (w.as_str(), n))
    }
}

/// True iff some token of `text` has more than `threshold` senses.
pub fn contains_polysemes(text: &str, lexicon: &SenseLexicon, threshold: u32) -> bool {
    tokenize_identifier(text).iter().any(|t| lexicon.sense_count(t) > threshold)
}

/// Non-empty, has a letter, and carries no control characters or
/// percent-encoded bytes.
pub fn text_validity(text: &str) -> bool {
    if text.is_empty() || !text.chars().any(char::is_alphabetic) {
        return false;
    }
    if text.chars().any(char::is_control) {
        return false;
    }
    let bytes = text.as_bytes();
    !bytes
        .windows(3)
        .any(|w| w[0] == b'%' && w[1].is_ascii_hexdigit() && w[2].is_ascii_hexdigit())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NamingConvention {
    PascalCase,
    CamelCase,
    SnakeCase,
    Other,
}

pub fn naming_convention(id: &str) -> NamingConvention {
    let mut chars = id.chars();
    let Some(first) = chars.next() else {
        return NamingConvention::Other;
    };
    let alnum = id.chars().all(|c| c.is_alphanumeric());
    if alnum && first.is_uppercase() {
        return NamingConvention::PascalCase;
    }
    if alnum && first.is_lowercase() {
        return NamingConvention::CamelCase;
    }
    let snake = first.is_lowercase()
        && id.chars().all(|c| c.is_lowercase() || c.is_ascii_digit() || c == '_')
        && !id.ends_with('_')
        && !id.contains("__");
    if snake {
        NamingConvention::SnakeCase
    } else {
        NamingConvention::Other
    }
}

/// True iff every id follows the same naming convention. Heuristic: it does
/// not know which convention a given element kind ought to use.
pub fn id_consistency<S: AsRef<str>>(ids: &[S]) -> bool {
    let mut conventions = ids.iter().map(|id| naming_convention(id.as_ref()));
    match conventions.next() {
        None => false,
        Some(first) => conventions.all(|c| c == first),
    }
}

/// Cosine similarity; 0 when either vector has zero norm.
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64, LexiconError> {
    if a.len() != b.len() {
        return Err(LexiconError::DimensionMismatch { left: a.len(), right: b.len() });
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

/// Maps text to a fixed-dimension unit vector. Empty text may map to the
/// zero vector.
pub trait EmbeddingProvider: Send + Sync {
    fn dim(&self) -> usize;
    fn embed(&self, text: &str) -> Result<Vec<f64>, LexiconError>;
}

/// Signed character-trigram hashing. Deterministic and dependency-free.
#[derive(Debug, Clone, Copy)]
pub struct HashEmbedder {
    dim: usize,
}

impl Default for HashEmbedder {
    fn default() -> Self {
        HashEmbedder { dim: 256 }
    }
}

impl HashEmbedder {
    pub fn with_dim(dim: usize) -> Self {
        assert!(dim > 0, "embedding dimension must be positive");
        HashEmbedder { dim }
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

impl EmbeddingProvider for HashEmbedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, text: &str) -> Result<Vec<f64>, LexiconError> {
        let mut v = vec![0.0; self.dim];
        let normalized = text.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
        if normalized.is_empty() {
            return Ok(v);
        }
        let padded: Vec<char> = format!(" {normalized} ").chars().collect();
        let mut buf = String::new();
        for w in padded.windows(3) {
            buf.clear();
            buf.extend(w);
            let h = fnv1a(buf.as_bytes());
            let bucket = (h % self.dim as u64) as usize;
            let sign = if h >> 63 == 1 { -1.0 } else { 1.0 };
            v[bucket] += sign;
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
        }
        Ok(v)
    }
}

/// Precomputed vectors read from a JSON fixture.
#[derive(Debug, Clone)]
pub struct FixtureEmbedder {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

#[derive(Deserialize)]
struct FixtureFile {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl FixtureEmbedder {
    pub fn from_json(text: &str) -> Result<Self, LexiconError> {
        let file: FixtureFile =
            serde_json::from_str(text).map_err(|e| LexiconError::InvalidFixture(e.to_string()))?;
        for (text, v) in &file.vectors {
            if v.len() != file.dim {
                return Err(LexiconError::InvalidFixture(format!(
                    "vector for {text:?} has {} components, expected {}",
                    v.len(),
                    file.dim
                )));
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm != 0.0 && (norm - 1.0).abs() > 1e-6 {
                return Err(LexiconError::InvalidFixture(format!("vector for {text:?} is not unit length")));
            }
        }
        Ok(FixtureEmbedder { dim: file.dim, vectors: file.vectors })
    }

    pub fn load(path: &Path) -> Result<Self, LexiconError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LexiconError::InvalidFixture(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

impl EmbeddingProvider for FixtureEmbedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, text: &str) -> Result<Vec<f64>, LexiconError> {
        self.vectors.get(text).cloned().ok_or_else(|| LexiconError::UnknownText(text.to_owned()))
    }
}
