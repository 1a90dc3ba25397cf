//! Expertise features from validator profile archives.
//!
//! `tweet_sim` is the mean of the K highest keyword similarities among a
//! validator's most recent posts; `friend_sim` is the mean of the K' highest
//! `tweet_sim` values among their most recent friends. A regressor turns the
//! pair into a score used as a vote weight.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{cosine, EmbeddingProvider, LexiconError};
use crate::regress::{Features, Model, RegressError, Regressor};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExpertiseError {
    #[error("handle `{0}` is not in the profile archive")]
    UnknownHandle(String),
    #[error("invalid expertise configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid profile archive: {0}")]
    InvalidArchive(String),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Regress(#[from] RegressError),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    /// Most recent first.
    #[serde(default)]
    pub tweets: Vec<String>,
    /// Most recent first.
    #[serde(default)]
    pub friends: Vec<String>,
    /// Private profiles cannot be read and are skipped like missing ones.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub private: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProfileArchive {
    pub profiles: BTreeMap<String, Profile>,
}

impl ProfileArchive {
    pub fn from_json(text: &str) -> Result<Self, ExpertiseError> {
        serde_json::from_str(text).map_err(|e| ExpertiseError::InvalidArchive(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("archive serializes")
    }

    /// The profile behind `handle`, unless it is absent or private.
    pub fn readable(&self, handle: &str) -> Option<&Profile> {
        self.profiles.get(handle).filter(|p| !p.private)
    }

    /// Splits handles into readable ones and ones that must be skipped,
    /// keeping input order.
    pub fn partition_handles<'h>(&self, handles: impl IntoIterator<Item = &'h str>) -> (Vec<String>, Vec<String>) {
        let mut present = Vec::new();
        let mut missing = Vec::new();
        for h in handles {
            if self.readable(h).is_some() {
                present.push(h.to_owned());
            } else {
                missing.push(h.to_owned());
            }
        }
        (present, missing)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpertiseConfig {
    /// Posts considered per profile.
    #[serde(default = "default_n")]
    pub n: usize,
    /// Friends considered per profile.
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_k_prime")]
    pub k_prime: usize,
    pub domain_keywords: Vec<String>,
}

fn default_n() -> usize {
    200
}

fn default_m() -> usize {
    50
}

fn default_k() -> usize {
    20
}

fn default_k_prime() -> usize {
    5
}

impl ExpertiseConfig {
    pub fn new(domain_keywords: Vec<String>) -> Self {
        ExpertiseConfig { n: default_n(), m: default_m(), k: default_k(), k_prime: default_k_prime(), domain_keywords }
    }

    pub fn validate(&self) -> Result<(), ExpertiseError> {
        let bad = |msg: String| Err(ExpertiseError::InvalidConfig(msg));
        if self.n == 0 || self.m == 0 || self.k == 0 || self.k_prime == 0 {
            return bad("n, m, K and K' must be positive".into());
        }
        if self.k > self.n {
            return bad(format!("K = {} exceeds n = {}", self.k, self.n));
        }
        if self.k_prime > self.m {
            return bad(format!("K' = {} exceeds m = {}", self.k_prime, self.m));
        }
        if self.domain_keywords.iter().all(|k| k.trim().is_empty()) {
            return bad("at least one domain keyword is required".into());
        }
        Ok(())
    }
}

/// Mean of the `k` largest values; 0 for an empty list.
pub fn top_k_mean(mut values: Vec<f64>, k: usize) -> f64 {
    if values.is_empty() || k == 0 {
        return 0.0;
    }
    values.sort_by(|a, b| b.total_cmp(a));
    let take = k.min(values.len());
    values[..take].iter().sum::<f64>() / take as f64
}

/// Computes similarity features for one archive and keyword set, caching
/// per-handle results.
pub struct FeatureExtractor<'a> {
    archive: &'a ProfileArchive,
    config: ExpertiseConfig,
    embedder: &'a dyn EmbeddingProvider,
    keywords: Vec<Vec<f64>>,
    cache: HashMap<String, f64>,
}

impl<'a> FeatureExtractor<'a> {
    pub fn new(
        archive: &'a ProfileArchive,
        config: ExpertiseConfig,
        embedder: &'a dyn EmbeddingProvider,
    ) -> Result<Self, ExpertiseError> {
        config.validate()?;
        let keywords = config
            .domain_keywords
            .iter()
            .filter(|k| !k.trim().is_empty())
            .map(|k| embedder.embed(k))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FeatureExtractor { archive, config, embedder, keywords, cache: HashMap::new() })
    }

    pub fn config(&self) -> &ExpertiseConfig {
        &self.config
    }

    /// Best keyword similarity of one text.
    pub fn text_similarity(&self, text: &str) -> Result<f64, ExpertiseError> {
        let v = self.embedder.embed(text)?;
        let mut best = f64::NEG_INFINITY;
        for k in &self.keywords {
            best = best.max(cosine(&v, k)?);
        }
        Ok(best)
    }

    pub fn tweet_sim(&mut self, handle: &str) -> Result<f64, ExpertiseError> {
        if let Some(&cached) = self.cache.get(handle) {
            return Ok(cached);
        }
        let profile = self.archive.readable(handle).ok_or_else(|| ExpertiseError::UnknownHandle(handle.to_owned()))?;
        let sims = profile
            .tweets
            .iter()
            .take(self.config.n)
            .map(|t| self.text_similarity(t))
            .collect::<Result<Vec<_>, _>>()?;
        let value = top_k_mean(sims, self.config.k);
        self.cache.insert(handle.to_owned(), value);
        Ok(value)
    }

    /// Friends that cannot be read are skipped; they do not count towards m.
    pub fn friend_sim(&mut self, handle: &str) -> Result<f64, ExpertiseError> {
        let profile = self.archive.readable(handle).ok_or_else(|| ExpertiseError::UnknownHandle(handle.to_owned()))?;
        let friends: Vec<&str> = profile
            .friends
            .iter()
            .filter(|f| self.archive.readable(f).is_some())
            .take(self.config.m)
            .map(String::as_str)
            .collect();
        let mut scores = Vec::with_capacity(friends.len());
        for f in friends {
            scores.push(self.tweet_sim(f)?);
        }
        Ok(top_k_mean(scores, self.config.k_prime))
    }

    pub fn features(&mut self, handle: &str) -> Result<Features, ExpertiseError> {
        Ok([self.tweet_sim(handle)?, self.friend_sim(handle)?])
    }
}

pub fn tweet_sim(
    handle: &str,
    archive: &ProfileArchive,
    config: &ExpertiseConfig,
    embedder: &dyn EmbeddingProvider,
) -> Result<f64, ExpertiseError> {
    FeatureExtractor::new(archive, config.clone(), embedder)?.tweet_sim(handle)
}

pub fn friend_sim(
    handle: &str,
    archive: &ProfileArchive,
    config: &ExpertiseConfig,
    embedder: &dyn EmbeddingProvider,
) -> Result<f64, ExpertiseError> {
    FeatureExtractor::new(archive, config.clone(), embedder)?.friend_sim(handle)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpertiseRecord {
    pub handle: String,
    pub tweet_sim: f64,
    pub friend_sim: f64,
    pub score: f64,
}

/// Scores each handle with `model`, clamped to [0, 1], in input order.
pub fn tweet_expert_scores(
    handles: &[String],
    archive: &ProfileArchive,
    config: &ExpertiseConfig,
    embedder: &dyn EmbeddingProvider,
    model: &Model,
) -> Result<Vec<ExpertiseRecord>, ExpertiseError> {
    let mut extractor = FeatureExtractor::new(archive, config.clone(), embedder)?;
    let mut records = Vec::with_capacity(handles.len());
    for handle in handles {
        let [tweet_sim, friend_sim] = extractor.features(handle)?;
        let score = model.predict([tweet_sim, friend_sim])?.clamp(0.0, 1.0);
        records.push(ExpertiseRecord { handle: handle.clone(), tweet_sim, friend_sim, score });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::HashEmbedder;
    use proptest::prelude::*;

    fn archive(entries: &[(&str, &[&str], &[&str])]) -> ProfileArchive {
        ProfileArchive {
            profiles: entries
                .iter()
                .map(|(h, tweets, friends)| {
                    let p = Profile {
                        tweets: tweets.iter().map(|s| s.to_string()).collect(),
                        friends: friends.iter().map(|s| s.to_string()).collect(),
                        private: false,
                    };
                    (h.to_string(), p)
                })
                .collect(),
        }
    }

    fn config() -> ExpertiseConfig {
        ExpertiseConfig::new(vec!["pizza".into()])
    }

    #[test]
    fn keyword_only_profile() {
        let a = archive(&[("chef", &["pizza", "pizza", "pizza"], &[]), ("fan", &[], &["chef", "ghost"])]);
        let e = HashEmbedder::default();
        assert!((tweet_sim("chef", &a, &config(), &e).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(tweet_sim("fan", &a, &config(), &e).unwrap(), 0.0);
        assert_eq!(friend_sim("chef", &a, &config(), &e).unwrap(), 0.0);
        let fs = friend_sim("fan", &a, &config(), &e).unwrap();
        assert_eq!(fs, tweet_sim("chef", &a, &config(), &e).unwrap());
        assert!(matches!(tweet_sim("nobody", &a, &config(), &e), Err(ExpertiseError::UnknownHandle(_))));
    }

    #[test]
    fn private_profiles_are_unreadable() {
        let mut a = archive(&[("a", &["pizza"], &["b"]), ("b", &["pizza"], &[])]);
        a.profiles.get_mut("b").unwrap().private = true;
        let e = HashEmbedder::default();
        assert_eq!(friend_sim("a", &a, &config(), &e).unwrap(), 0.0);
        let (present, missing) = a.partition_handles(["a", "b", "c"]);
        assert_eq!(present, ["a"]);
        assert_eq!(missing, ["b", "c"]);
    }

    #[test]
    fn config_validation() {
        let mut c = config();
        c.k = 300;
        assert!(c.validate().is_err());
        let mut c = config();
        c.domain_keywords = vec![" ".into()];
        assert!(c.validate().is_err());
        assert!(config().validate().is_ok());
    }

    #[test]
    fn identity_model_on_keyword_profile() {
        let a = archive(&[("chef", &["pizza"], &["chef2"]), ("chef2", &["pizza"], &[])]);
        let e = HashEmbedder::default();
        let handles = vec!["chef".to_string(), "chef".to_string()];
        let records = tweet_expert_scores(&handles, &a, &config(), &e, &Model::Identity).unwrap();
        assert!((records[0].score - 1.0).abs() < 1e-12);
        assert_eq!(records[0], records[1]);
    }

    #[test]
    fn untrained_model_is_rejected() {
        let a = archive(&[("chef", &["pizza"], &[])]);
        let e = HashEmbedder::default();
        let model = Model::linear();
        let err = tweet_expert_scores(&["chef".into()], &a, &config(), &e, &model).unwrap_err();
        assert_eq!(err, ExpertiseError::Regress(RegressError::UntrainedModel));
    }

    fn sims_strategy() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-1.0f64..1.0, 0..60)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn low_additions_do_not_change_top_k(sims in sims_strategy(), k in 1usize..25, below in 0.0f64..1.0) {
            prop_assume!(sims.len() >= k);
            let before = top_k_mean(sims.clone(), k);
            let mut sorted = sims.clone();
            sorted.sort_by(|a, b| b.total_cmp(a));
            let kth = sorted[k - 1];
            let mut more = sims.clone();
            more.push(kth - below - 1e-9);
            prop_assert_eq!(top_k_mean(more, k), before);
        }

        #[test]
        fn top_k_ignores_order(sims in sims_strategy(), k in 1usize..25, seed in any::<u64>()) {
            let before = top_k_mean(sims.clone(), k);
            let mut shuffled = sims.clone();
            let n = shuffled.len().max(1);
            shuffled.rotate_left((seed as usize) % n);
            shuffled.reverse();
            prop_assert!((top_k_mean(shuffled, k) - before).abs() < 1e-12);
        }

        #[test]
        fn raising_a_value_never_lowers_top_k(sims in sims_strategy(), k in 1usize..25, i in any::<prop::sample::Index>(), up in 0.0f64..1.0) {
            prop_assume!(!sims.is_empty());
            let before = top_k_mean(sims.clone(), k);
            let mut raised = sims.clone();
            let at = i.index(raised.len());
            raised[at] += up;
            prop_assert!(top_k_mean(raised, k) >= before - 1e-12);
        }
    }
}
