//! Deterministic synthetic validation datasets.
//!
//! Each dataset has 28 readable validators. Experts post about the domain
//! keywords and follow domain accounts; laymen do neither. On every niche
//! item exactly 17 validators answer wrong, so an unweighted majority fails
//! there, while common items are answered correctly by a clear majority.

use std::collections::BTreeMap;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::expertise::{ExpertiseConfig, ExpertiseError, FeatureExtractor, Profile, ProfileArchive};
use crate::lexicon::EmbeddingProvider;
use crate::onto::ItemKind;
use crate::regress::{Decision, DecisionMatrix, Gold, TrainingExample, Verdict};
use crate::validation::{write_log, DecisionLogEntry};

pub const VALIDATORS: usize = 28;
pub const EXPERTS: usize = 11;
pub const NICHE_ITEMS: usize = 10;
pub const COMMON_ITEMS: usize = 2;
pub const NICHE_WRONG: usize = 17;
pub const TWEETS_PER_PROFILE: usize = 30;
pub const FRIENDS_PER_VALIDATOR: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Pizza,
    Security,
}

impl Domain {
    pub fn parse(s: &str) -> Option<Domain> {
        match s.to_ascii_lowercase().as_str() {
            "pizza" => Some(Domain::Pizza),
            "security" => Some(Domain::Security),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Domain::Pizza => "pizza",
            Domain::Security => "security",
        }
    }

    pub fn keywords(self) -> Vec<String> {
        match self {
            Domain::Pizza => vec!["Pizza".into()],
            Domain::Security => vec!["Information Security".into(), "Cybersecurity".into()],
        }
    }

    fn namespace(self) -> &'static str {
        match self {
            Domain::Pizza => "http://example.org/synthetic/pizza#",
            Domain::Security => "http://example.org/synthetic/security#",
        }
    }

    fn topic_tweets(self) -> &'static [&'static str] {
        match self {
            Domain::Pizza => &[
                "pizza night: {w} and fresh basil on a thin crust pizza",
                "tried a new pizza dough recipe with {w}",
                "best pizza in town has {w} as a topping",
                "wood fired pizza oven finally reached temperature, {w} pizza tonight",
                "hot take: {w} belongs on pizza",
                "pizza margherita vs pizza with {w}, thoughts?",
                "our pizza class covered {w} and mozzarella",
                "the pizza ontology still lacks {w} pizza",
            ],
            Domain::Security => &[
                "information security tip: rotate {w} credentials regularly",
                "cybersecurity briefing on {w} and firewall policy",
                "new cybersecurity advisory about {w} malware",
                "information security audit found {w} misconfigured",
                "patching {w} today, cybersecurity never sleeps",
                "threat model for {w}: information security basics",
                "cybersecurity team ran a {w} phishing drill",
                "information security risk register now tracks {w}",
            ],
        }
    }

    fn topic_words(self) -> &'static [&'static str] {
        match self {
            Domain::Pizza => &["pepperoni", "mushroom", "paneer", "anchovy", "olive", "jalapeno", "pineapple", "ricotta"],
            Domain::Security => &["vpn", "ransomware", "endpoint", "password", "tls", "backup", "token", "ssh"],
        }
    }
}

const GENERIC_TWEETS: &[&str] = &[
    "rainy morning, coffee and a long {w}",
    "watching the {w} game with friends",
    "finished a great book about {w}",
    "traffic on the bridge again, late for {w}",
    "weekend hike up the {w} trail",
    "new playlist for {w} is up",
    "garden update: the {w} are finally blooming",
    "can anyone recommend a good {w} repair shop",
    "throwback to that {w} concert last summer",
    "marathon training week six, legs feel like {w}",
];

const GENERIC_WORDS: &[&str] =
    &["walk", "football", "history", "meeting", "mountain", "running", "tulips", "bicycle", "jazz", "jelly"];

const DOMAIN_ACCOUNTS: usize = 12;
const GENERAL_ACCOUNTS: usize = 12;
const PRIVATE_ACCOUNTS: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSet {
    pub domain: Domain,
    pub keywords: Vec<String>,
    pub archive: ProfileArchive,
    pub matrix: DecisionMatrix,
    pub gold: Gold,
    /// Correct answers over answers given, per validator.
    pub labels: BTreeMap<String, f64>,
    pub experts: Vec<String>,
    pub niche_items: Vec<String>,
}

fn fill(template: &str, word: &str) -> String {
    template.replace("{w}", word)
}

fn tweets(rng: &mut ChaCha8Rng, domain: Domain, topical: usize) -> Vec<String> {
    let mut out = Vec::with_capacity(TWEETS_PER_PROFILE);
    for i in 0..TWEETS_PER_PROFILE {
        let text = if i < topical {
            fill(domain.topic_tweets().choose(rng).unwrap(), domain.topic_words().choose(rng).unwrap())
        } else {
            fill(GENERIC_TWEETS.choose(rng).unwrap(), GENERIC_WORDS.choose(rng).unwrap())
        };
        out.push(text);
    }
    out.shuffle(rng);
    out
}

fn pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("value serializes") + "\n"
}

fn opposite(v: Verdict) -> Verdict {
    match v {
        Verdict::Accept => Verdict::Reject,
        Verdict::Reject => Verdict::Accept,
    }
}

/// Builds the dataset for `domain` from `seed`; the same inputs always give
/// the same dataset.
pub fn generate(domain: Domain, seed: u64) -> SyntheticSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let handles: Vec<String> = (1..=VALIDATORS).map(|i| format!("{}_v{i:02}", domain.name())).collect();
    let mut roles: Vec<bool> = (0..VALIDATORS).map(|i| i < EXPERTS).collect();
    roles.shuffle(&mut rng);
    let experts: Vec<String> = handles.iter().zip(&roles).filter(|(_, &e)| e).map(|(h, _)| h.clone()).collect();
    let laymen: Vec<String> = handles.iter().zip(&roles).filter(|(_, &e)| !e).map(|(h, _)| h.clone()).collect();

    let mut archive = ProfileArchive::default();
    let domain_accounts: Vec<String> = (1..=DOMAIN_ACCOUNTS).map(|i| format!("{}_fan{i:02}", domain.name())).collect();
    let general_accounts: Vec<String> = (1..=GENERAL_ACCOUNTS).map(|i| format!("{}_acct{i:02}", domain.name())).collect();
    let private_accounts: Vec<String> =
        (1..=PRIVATE_ACCOUNTS).map(|i| format!("{}_private{i:02}", domain.name())).collect();
    for h in &domain_accounts {
        let topical = rng.random_range(20..=TWEETS_PER_PROFILE);
        archive.profiles.insert(h.clone(), Profile { tweets: tweets(&mut rng, domain, topical), ..Profile::default() });
    }
    for h in &general_accounts {
        let topical = rng.random_range(0..=2);
        archive.profiles.insert(h.clone(), Profile { tweets: tweets(&mut rng, domain, topical), ..Profile::default() });
    }
    for h in &private_accounts {
        archive.profiles.insert(h.clone(), Profile { private: true, ..Profile::default() });
    }

    for (h, &expert) in handles.iter().zip(&roles) {
        let topical = if expert { rng.random_range(14..=26) } else { rng.random_range(0..=3) };
        let (fans, general) = if expert { (6, 2) } else { (1, 7) };
        let mut friends: Vec<String> = domain_accounts.choose_multiple(&mut rng, fans).cloned().collect();
        friends.extend(general_accounts.choose_multiple(&mut rng, general).cloned());
        friends.push(private_accounts.choose(&mut rng).unwrap().clone());
        friends.push(format!("{}_gone{:02}", domain.name(), rng.random_range(1..=99)));
        debug_assert_eq!(friends.len(), FRIENDS_PER_VALIDATOR);
        friends.shuffle(&mut rng);
        archive.profiles.insert(h.clone(), Profile { tweets: tweets(&mut rng, domain, topical), friends, private: false });
    }

    let niche_items: Vec<String> = (1..=NICHE_ITEMS).map(|i| format!("{}Niche{i:02}", domain.namespace())).collect();
    let common_items: Vec<String> =
        (1..=COMMON_ITEMS).map(|i| format!("{}Common{i:02}", domain.namespace())).collect();
    let mut items: Vec<String> = niche_items.iter().chain(&common_items).cloned().collect();
    items.sort();
    let gold: Gold =
        items.iter().map(|i| (i.clone(), if rng.random_bool(0.5) { Verdict::Accept } else { Verdict::Reject })).collect();

    let mut answers: BTreeMap<String, BTreeMap<String, Decision>> = BTreeMap::new();
    let mut answer = |h: &str, item: &str, right: bool| {
        let v = if right { gold[item] } else { opposite(gold[item]) };
        answers.entry(h.to_owned()).or_default().insert(item.to_owned(), v.into());
    };
    for (j, item) in niche_items.iter().enumerate() {
        // Odd items swap one expert and one layman; the wrong count stays 17.
        let swap = j % 2 == 1;
        let wrong_expert = swap.then(|| experts[j % EXPERTS].clone());
        let right_layman = swap.then(|| laymen[(j * 5) % laymen.len()].clone());
        for h in &experts {
            answer(h, item, wrong_expert.as_ref() != Some(h));
        }
        for h in &laymen {
            answer(h, item, right_layman.as_ref() == Some(h));
        }
    }
    for item in &common_items {
        let wrong: Vec<String> = laymen.choose_multiple(&mut rng, 3).cloned().collect();
        for h in &handles {
            answer(h, item, !wrong.contains(h));
        }
    }
    let labels = answers
        .iter()
        .map(|(h, row)| {
            let right = row.iter().filter(|(item, d)| **d == Decision::from(gold[*item])).count();
            (h.clone(), right as f64 / row.len() as f64)
        })
        .collect();

    SyntheticSet {
        domain,
        keywords: domain.keywords(),
        archive,
        matrix: DecisionMatrix { items, decisions: answers },
        gold,
        labels,
        experts,
        niche_items,
    }
}

impl SyntheticSet {
    pub fn config(&self) -> ExpertiseConfig {
        ExpertiseConfig::new(self.keywords.clone())
    }

    /// Features from `embedder` paired with the correct-answer ratio.
    pub fn examples(
        &self,
        config: &ExpertiseConfig,
        embedder: &dyn EmbeddingProvider,
    ) -> Result<Vec<TrainingExample>, ExpertiseError> {
        let mut extractor = FeatureExtractor::new(&self.archive, config.clone(), embedder)?;
        self.labels
            .iter()
            .map(|(h, &label)| Ok(TrainingExample { handle: h.clone(), features: extractor.features(h)?, label }))
            .collect()
    }

    /// File name and contents of every artifact of the dataset, with
    /// features computed by `embedder` under the default configuration.
    pub fn files(&self, embedder: &dyn EmbeddingProvider) -> Result<Vec<(&'static str, String)>, ExpertiseError> {
        let examples = self.examples(&self.config(), embedder)?;
        Ok(vec![
            ("archive.json", self.archive.to_json() + "\n"),
            ("matrix.json", self.matrix.to_json() + "\n"),
            ("decisions.jsonl", write_log(&self.log(self.domain.name()))),
            ("gold.json", pretty(&self.gold)),
            ("examples.json", pretty(&examples)),
            ("keywords.json", pretty(&self.keywords)),
        ])
    }

    /// The decisions as a log, validator by validator.
    pub fn log(&self, ontology_id: &str) -> Vec<DecisionLogEntry> {
        let mut out = Vec::new();
        for (h, row) in &self.matrix.decisions {
            for (item, d) in row {
                let decision = match d {
                    Decision::Accept => Verdict::Accept,
                    Decision::Reject => Verdict::Reject,
                    Decision::Abstain => continue,
                };
                out.push(DecisionLogEntry {
                    timestamp: "2024-01-01T00:00:00Z".into(),
                    ontology_id: ontology_id.to_owned(),
                    validator_handle: h.clone(),
                    item_key: item.clone(),
                    item_kind: ItemKind::Concept,
                    decision,
                });
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regress::naive_majority;

    #[test]
    fn niche_items_defeat_the_majority() {
        for domain in [Domain::Pizza, Domain::Security] {
            let set = generate(domain, 7);
            assert_eq!(set.matrix.decisions.len(), VALIDATORS);
            assert_eq!(set.experts.len(), EXPERTS);
            for item in &set.niche_items {
                let wrong = set
                    .matrix
                    .decisions
                    .values()
                    .filter(|row| row[item] != Decision::from(set.gold[item]))
                    .count();
                assert_eq!(wrong, NICHE_WRONG, "{item}");
            }
            let naive = naive_majority(&set.matrix);
            for (item, verdict) in &naive {
                assert_eq!(set.niche_items.contains(item), *verdict != set.gold[item], "{item}");
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(generate(Domain::Pizza, 3), generate(Domain::Pizza, 3));
        assert_ne!(generate(Domain::Pizza, 3).archive, generate(Domain::Pizza, 4).archive);
    }
}
