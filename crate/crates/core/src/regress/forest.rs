use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Features, RegressError, Regressor, TrainingExample};

/// Bagged depth-limited regression trees. Bootstrap samples come from a
/// generator seeded with `seed`, so fitting is reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Forest {
    pub trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fitted: Vec<Node>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    Leaf(f64),
    Split { feature: usize, threshold: f64, left: Box<Node>, right: Box<Node> },
}

impl Node {
    fn predict(&self, x: Features) -> f64 {
        match self {
            Node::Leaf(v) => *v,
            Node::Split { feature, threshold, left, right } => {
                if x[*feature] <= *threshold {
                    left.predict(x)
                } else {
                    right.predict(x)
                }
            }
        }
    }
}

impl Default for Forest {
    fn default() -> Self {
        Forest::new(0)
    }
}

impl Forest {
    pub fn new(seed: u64) -> Self {
        Forest { trees: 50, max_depth: 4, min_leaf: 2, seed, fitted: Vec::new() }
    }

    pub fn is_trained(&self) -> bool {
        !self.fitted.is_empty()
    }

    fn grow(&self, sample: &mut [(Features, f64)], depth: usize) -> Node {
        let mean = sample.iter().map(|s| s.1).sum::<f64>() / sample.len() as f64;
        if depth >= self.max_depth || sample.len() < 2 * self.min_leaf {
            return Node::Leaf(mean);
        }
        let sse = |part: &[(Features, f64)]| {
            let m = part.iter().map(|s| s.1).sum::<f64>() / part.len() as f64;
            part.iter().map(|s| (s.1 - m).powi(2)).sum::<f64>()
        };
        let mut best: Option<(f64, usize, f64)> = None;
        let parent = sse(sample);
        for feature in 0..2 {
            sample.sort_by(|a, b| a.0[feature].total_cmp(&b.0[feature]));
            for cut in self.min_leaf..=sample.len() - self.min_leaf {
                let (a, b) = (sample[cut - 1].0[feature], sample[cut].0[feature]);
                if a == b {
                    continue;
                }
                let cost = sse(&sample[..cut]) + sse(&sample[cut..]);
                if cost < parent - 1e-12 && best.is_none_or(|(c, _, _)| cost < c) {
                    best = Some((cost, feature, (a + b) / 2.0));
                }
            }
        }
        let Some((_, feature, threshold)) = best else {
            return Node::Leaf(mean);
        };
        sample.sort_by(|a, b| a.0[feature].total_cmp(&b.0[feature]));
        let cut = sample.partition_point(|s| s.0[feature] <= threshold);
        let (left, right) = sample.split_at_mut(cut);
        Node::Split {
            feature,
            threshold,
            left: Box::new(self.grow(left, depth + 1)),
            right: Box::new(self.grow(right, depth + 1)),
        }
    }
}

impl Regressor for Forest {
    fn fit(&mut self, examples: &[TrainingExample]) -> Result<(), RegressError> {
        if self.trees == 0 || self.min_leaf == 0 {
            return Err(RegressError::InvalidParameter("trees and min_leaf must be positive".into()));
        }
        if examples.len() < 2 {
            return Err(RegressError::InsufficientData { needed: 2, got: examples.len() });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let n = examples.len();
        let mut fitted = Vec::with_capacity(self.trees);
        for _ in 0..self.trees {
            let mut sample: Vec<(Features, f64)> = (0..n)
                .map(|_| {
                    let e = &examples[rng.random_range(0..n)];
                    (e.features, e.label)
                })
                .collect();
            fitted.push(self.grow(&mut sample, 0));
        }
        self.fitted = fitted;
        Ok(())
    }

    fn predict(&self, x: Features) -> Result<f64, RegressError> {
        if self.fitted.is_empty() {
            return Err(RegressError::UntrainedModel);
        }
        Ok(self.fitted.iter().map(|t| t.predict(x)).sum::<f64>() / self.fitted.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separates_a_step_and_is_reproducible() {
        let ex: Vec<TrainingExample> = (0..20)
            .map(|i| {
                let x = i as f64 / 20.0;
                TrainingExample { handle: i.to_string(), features: [x, 0.0], label: if x < 0.5 { 0.1 } else { 0.9 } }
            })
            .collect();
        let mut a = Forest::new(11);
        a.fit(&ex).unwrap();
        let mut b = Forest::new(11);
        b.fit(&ex).unwrap();
        assert_eq!(a, b);
        assert!(a.predict([0.1, 0.0]).unwrap() < 0.3);
        assert!(a.predict([0.9, 0.0]).unwrap() > 0.7);
        assert_eq!(Forest::new(1).predict([0.0, 0.0]), Err(RegressError::UntrainedModel));
    }
}
