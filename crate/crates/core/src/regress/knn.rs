use serde::{Deserialize, Serialize};

use super::{Features, RegressError, Regressor, TrainingExample};

/// Mean label of the k nearest training points (Euclidean). Distance ties
/// go to the earlier training example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Knn {
    pub k: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<(Features, f64)>,
}

impl Default for Knn {
    fn default() -> Self {
        Knn::new(3)
    }
}

impl Knn {
    pub fn new(k: usize) -> Self {
        Knn { k, points: Vec::new() }
    }

    pub fn is_trained(&self) -> bool {
        !self.points.is_empty()
    }
}

impl Regressor for Knn {
    fn fit(&mut self, examples: &[TrainingExample]) -> Result<(), RegressError> {
        if self.k == 0 {
            return Err(RegressError::InvalidParameter("k must be positive".into()));
        }
        if examples.len() < self.k {
            return Err(RegressError::InsufficientData { needed: self.k, got: examples.len() });
        }
        self.points = examples.iter().map(|e| (e.features, e.label)).collect();
        Ok(())
    }

    fn predict(&self, x: Features) -> Result<f64, RegressError> {
        if self.points.is_empty() {
            return Err(RegressError::UntrainedModel);
        }
        let mut order: Vec<(f64, usize)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, (p, _))| (((p[0] - x[0]).powi(2) + (p[1] - x[1]).powi(2)).sqrt(), i))
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let k = self.k.min(order.len());
        Ok(order[..k].iter().map(|&(_, i)| self.points[i].1).sum::<f64>() / k as f64)
    }
}
