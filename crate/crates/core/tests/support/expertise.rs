//! Sort-and-average oracles for the similarity features, plus profile properties.
#![allow(dead_code)]

use ontoqual_core::expertise::{friend_sim, tweet_sim, ExpertiseConfig, Profile, ProfileArchive};
use ontoqual_core::lexicon::{EmbeddingProvider, HashEmbedder};
use ontoqual_core::synthetic::{generate, Domain, FRIENDS_PER_VALIDATOR, TWEETS_PER_PROFILE};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

pub fn dot_cos(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

pub fn similarity(text: &str, keywords: &[String], emb: &dyn EmbeddingProvider) -> f64 {
    let v = emb.embed(text).unwrap();
    keywords.iter().map(|k| dot_cos(&v, &emb.embed(k).unwrap())).fold(f64::NEG_INFINITY, f64::max)
}

/// Sort everything descending, then average the first `k`.
pub fn sorted_mean(mut xs: Vec<f64>, k: usize) -> f64 {
    xs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    xs.truncate(k);
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

pub fn oracle_tweet(archive: &ProfileArchive, h: &str, cfg: &ExpertiseConfig, emb: &dyn EmbeddingProvider) -> f64 {
    let p = &archive.profiles[h];
    let sims = p.tweets.iter().take(cfg.n).map(|t| similarity(t, &cfg.domain_keywords, emb)).collect();
    sorted_mean(sims, cfg.k)
}

pub fn oracle_friend(archive: &ProfileArchive, h: &str, cfg: &ExpertiseConfig, emb: &dyn EmbeddingProvider) -> f64 {
    let readable = |f: &String| archive.profiles.get(f).is_some_and(|p| !p.private);
    let friends: Vec<&String> = archive.profiles[h].friends.iter().filter(|f| readable(f)).take(cfg.m).collect();
    sorted_mean(friends.into_iter().map(|f| oracle_tweet(archive, f, cfg, emb)).collect(), cfg.k_prime)
}

pub fn synthetic_archive_matches_sort_and_average_oracle() {
    let emb = HashEmbedder::default();
    for domain in [Domain::Pizza, Domain::Security] {
        let set = generate(domain, 7);
        let cfg = set.config();
        assert_eq!((cfg.k, cfg.k_prime), (20, 5));
        for h in set.matrix.validators() {
            let p = &set.archive.profiles[h];
            assert_eq!(p.tweets.len(), TWEETS_PER_PROFILE);
            assert_eq!(p.friends.len(), FRIENDS_PER_VALIDATOR);
            let t = tweet_sim(h, &set.archive, &cfg, &emb).unwrap();
            let f = friend_sim(h, &set.archive, &cfg, &emb).unwrap();
            assert!((t - oracle_tweet(&set.archive, h, &cfg, &emb)).abs() <= 1e-9, "{h}");
            assert!((f - oracle_friend(&set.archive, h, &cfg, &emb)).abs() <= 1e-9, "{h}");
        }
    }
}

const WORDS: &[&str] = &[
    "pizza", "crust", "oven", "cheese", "weather", "train", "football", "garden", "basil", "topping", "music", "pizzeria",
];

pub fn text() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(WORDS), 1..6).prop_map(|w| w.join(" "))
}

pub fn single(tweets: Vec<String>) -> ProfileArchive {
    let mut archive = ProfileArchive::default();
    archive.profiles.insert("u".into(), Profile { tweets, ..Profile::default() });
    archive
}

pub fn cfg(k: usize) -> ExpertiseConfig {
    ExpertiseConfig { k, ..ExpertiseConfig::new(vec!["Pizza".into()]) }
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() })
}

fn check<T: std::fmt::Debug>(result: Result<(), proptest::test_runner::TestError<T>>) {
    if let Err(e) = result {
        panic!("{e}");
    }
}

pub fn order_invariance(cases: u32) {
    let strategy = (prop::collection::vec(text(), 0..40), 1usize..25, any::<u64>());
    check(runner(cases).run(&strategy, |(tweets, k, seed)| {
        let emb = HashEmbedder::default();
        let mut shuffled = tweets.clone();
        let mut rng = seed;
        for i in (1..shuffled.len()).rev() {
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (rng >> 33) as usize % (i + 1));
        }
        let a = tweet_sim("u", &single(tweets), &cfg(k), &emb).unwrap();
        let b = tweet_sim("u", &single(shuffled), &cfg(k), &emb).unwrap();
        prop_assert!((a - b).abs() <= 1e-12);
        prop_assert!((-1.0..=1.0).contains(&a));
        Ok(())
    }));
}

/// A post scoring below the current K-th best leaves the mean unchanged.
pub fn top_k_stability(cases: u32) {
    let strategy = (prop::collection::vec(text(), 1..40), text(), 1usize..25);
    check(runner(cases).run(&strategy, |(tweets, extra, k)| {
        let emb = HashEmbedder::default();
        let c = cfg(k);
        let mut sims: Vec<f64> = tweets.iter().map(|t| similarity(t, &c.domain_keywords, &emb)).collect();
        sims.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let before = tweet_sim("u", &single(tweets.clone()), &c, &emb).unwrap();
        let s = similarity(&extra, &c.domain_keywords, &emb);
        let mut longer = tweets.clone();
        longer.push(extra);
        let after = tweet_sim("u", &single(longer), &c, &emb).unwrap();
        if sims.len() >= k && s < sims[k - 1] {
            prop_assert!((before - after).abs() <= 1e-12);
        }
        Ok(())
    }));
}

pub fn monotone_under_improvement(cases: u32) {
    let strategy = (prop::collection::vec(text(), 1..30), 1usize..25, any::<prop::sample::Index>());
    check(runner(cases).run(&strategy, |(tweets, k, idx)| {
        let emb = HashEmbedder::default();
        let c = cfg(k);
        let before = tweet_sim("u", &single(tweets.clone()), &c, &emb).unwrap();
        let mut better = tweets.clone();
        better[idx.index(tweets.len())] = "Pizza".into();
        let after = tweet_sim("u", &single(better), &c, &emb).unwrap();
        prop_assert!(after >= before - 1e-12);
        Ok(())
    }));
}
