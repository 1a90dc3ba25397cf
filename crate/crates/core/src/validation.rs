//! Crowd validation: the append-only decision log and finalization by
//! expertise-weighted voting.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expertise::{tweet_expert_scores, ExpertiseConfig, ExpertiseError, ExpertiseRecord, ProfileArchive};
use crate::lexicon::EmbeddingProvider;
use crate::onto::ItemKind;
use crate::regress::{vote_tallies, Decision, DecisionMatrix, Model, RegressError, Verdict};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("decision log line {line}: {message}")]
    MalformedLog { line: usize, message: String },
    #[error("no decisions have been logged")]
    NoDecisions,
    #[error("no logged validator has a readable profile")]
    NoReadableValidators,
    #[error(transparent)]
    Expertise(#[from] ExpertiseError),
    #[error(transparent)]
    Regress(#[from] RegressError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionLogEntry {
    pub timestamp: String,
    pub ontology_id: String,
    pub validator_handle: String,
    pub item_key: String,
    pub item_kind: ItemKind,
    pub decision: Verdict,
}

impl DecisionLogEntry {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("log entry serializes")
    }
}

/// Parses a JSON-lines log; blank lines are skipped.
pub fn parse_log(text: &str) -> Result<Vec<DecisionLogEntry>, ValidationError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| ValidationError::MalformedLog { line: i + 1, message: e.to_string() })
        })
        .collect()
}

pub fn write_log(entries: &[DecisionLogEntry]) -> String {
    entries.iter().map(|e| e.to_json_line() + "\n").collect()
}

/// Matrix of the latest decision per (validator, item), in log order. When
/// `items` is `None` the items are those mentioned in the log.
pub fn latest_matrix(entries: &[DecisionLogEntry], items: Option<&[String]>) -> DecisionMatrix {
    let mut decisions: BTreeMap<String, BTreeMap<String, Decision>> = BTreeMap::new();
    for e in entries {
        decisions.entry(e.validator_handle.clone()).or_default().insert(e.item_key.clone(), e.decision.into());
    }
    let items = match items {
        Some(items) => items.to_vec(),
        None => {
            let mut seen: Vec<String> = entries.iter().map(|e| e.item_key.clone()).collect();
            seen.sort();
            seen.dedup();
            seen
        }
    };
    DecisionMatrix { items, decisions }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemResult {
    pub item: String,
    pub decision: Verdict,
    pub accept_weight: f64,
    pub reject_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalizationResult {
    pub model: String,
    pub items: Vec<ItemResult>,
    pub validators: Vec<ExpertiseRecord>,
    pub excluded: Vec<String>,
    pub warnings: Vec<String>,
}

impl FinalizationResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }
}

/// Scores every validator in `matrix` whose profile is readable, drops the
/// rest with a warning, and takes the weighted vote. `model` must already be
/// trained.
pub fn finalize(
    matrix: &DecisionMatrix,
    archive: &ProfileArchive,
    config: &ExpertiseConfig,
    embedder: &dyn EmbeddingProvider,
    model: &Model,
) -> Result<FinalizationResult, ValidationError> {
    if matrix.decisions.values().all(BTreeMap::is_empty) {
        return Err(ValidationError::NoDecisions);
    }
    let (present, excluded) = archive.partition_handles(matrix.validators());
    if present.is_empty() {
        return Err(ValidationError::NoReadableValidators);
    }
    let warnings = excluded
        .iter()
        .map(|h| format!("validator `{h}` has no readable profile; their decisions were discarded"))
        .collect();
    let validators = tweet_expert_scores(&present, archive, config, embedder, model)?;
    let weights: BTreeMap<String, f64> = validators.iter().map(|r| (r.handle.clone(), r.score)).collect();
    let tallies = vote_tallies(&matrix.restrict(&present), &weights)?;
    let items = matrix
        .items
        .iter()
        .map(|item| {
            let t = tallies[item];
            ItemResult { item: item.clone(), decision: t.verdict(), accept_weight: t.accept, reject_weight: t.reject }
        })
        .collect();
    Ok(FinalizationResult { model: model.describe(), items, validators, excluded, warnings })
}
