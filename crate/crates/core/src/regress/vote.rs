use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::RegressError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Accept,
    Reject,
    Abstain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

impl From<Verdict> for Decision {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Accept => Decision::Accept,
            Verdict::Reject => Decision::Reject,
        }
    }
}

/// Reference answers per item.
pub type Gold = BTreeMap<String, Verdict>;

/// Decisions of validators on items. A missing entry is an abstention.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DecisionMatrix {
    pub items: Vec<String>,
    pub decisions: BTreeMap<String, BTreeMap<String, Decision>>,
}

impl DecisionMatrix {
    pub fn from_json(text: &str) -> Result<Self, RegressError> {
        let m: DecisionMatrix = serde_json::from_str(text).map_err(|e| RegressError::Json(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("matrix serializes")
    }

    pub fn validate(&self) -> Result<(), RegressError> {
        for row in self.decisions.values() {
            if let Some(item) = row.keys().find(|i| !self.items.contains(i)) {
                return Err(RegressError::UnknownItem(item.clone()));
            }
        }
        Ok(())
    }

    pub fn validators(&self) -> impl Iterator<Item = &str> {
        self.decisions.keys().map(String::as_str)
    }

    pub fn decision(&self, validator: &str, item: &str) -> Decision {
        self.decisions.get(validator).and_then(|row| row.get(item)).copied().unwrap_or(Decision::Abstain)
    }

    /// Same items, only the listed validators.
    pub fn restrict<S: AsRef<str>>(&self, validators: &[S]) -> DecisionMatrix {
        DecisionMatrix {
            items: self.items.clone(),
            decisions: validators
                .iter()
                .filter_map(|v| self.decisions.get_key_value(v.as_ref()))
                .map(|(k, row)| (k.clone(), row.clone()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tally {
    pub accept: f64,
    pub reject: f64,
}

impl Tally {
    /// Accept iff the accept weight strictly exceeds the reject weight,
    /// beyond a relative tolerance of 1e-12. Ties reject.
    pub fn verdict(&self) -> Verdict {
        if self.accept - self.reject > 1e-12 * (self.accept + self.reject) {
            Verdict::Accept
        } else {
            Verdict::Reject
        }
    }
}

/// Summed accept and reject weights per item.
pub fn vote_tallies(
    matrix: &DecisionMatrix,
    weights: &BTreeMap<String, f64>,
) -> Result<BTreeMap<String, Tally>, RegressError> {
    for v in matrix.validators() {
        let w = *weights.get(v).ok_or_else(|| RegressError::MissingWeight(v.to_owned()))?;
        if !w.is_finite() || w < 0.0 {
            return Err(RegressError::InvalidWeight(v.to_owned()));
        }
    }
    let mut out = BTreeMap::new();
    for item in &matrix.items {
        let mut tally = Tally { accept: 0.0, reject: 0.0 };
        for (v, row) in &matrix.decisions {
            match row.get(item) {
                Some(Decision::Accept) => tally.accept += weights[v],
                Some(Decision::Reject) => tally.reject += weights[v],
                Some(Decision::Abstain) | None => {}
            }
        }
        out.insert(item.clone(), tally);
    }
    Ok(out)
}

/// Weighted majority per item; see [`Tally::verdict`].
pub fn weighted_vote(
    matrix: &DecisionMatrix,
    weights: &BTreeMap<String, f64>,
) -> Result<BTreeMap<String, Verdict>, RegressError> {
    Ok(vote_tallies(matrix, weights)?.into_iter().map(|(item, t)| (item, t.verdict())).collect())
}

/// One validator, one vote.
pub fn naive_majority(matrix: &DecisionMatrix) -> BTreeMap<String, Verdict> {
    let weights = matrix.validators().map(|v| (v.to_owned(), 1.0)).collect();
    weighted_vote(matrix, &weights).expect("unit weights are valid")
}

/// Fraction of gold items whose verdict matches.
pub fn accuracy(verdicts: &BTreeMap<String, Verdict>, gold: &Gold) -> Result<f64, RegressError> {
    if gold.is_empty() {
        return Ok(0.0);
    }
    let mut correct = 0;
    for (item, expected) in gold {
        if verdicts.get(item) == Some(expected) {
            correct += 1;
        }
    }
    Ok(correct as f64 / gold.len() as f64)
}
