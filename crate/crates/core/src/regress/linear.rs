use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{all_features_identical, Features, RegressError, Regressor, TrainingExample};

/// Ordinary least squares with an intercept.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Linear {
    /// `[intercept, tweet_sim, friend_sim]` once fitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<[f64; 3]>,
}

impl Linear {
    pub fn is_trained(&self) -> bool {
        self.coefficients.is_some()
    }
}

impl Regressor for Linear {
    fn fit(&mut self, examples: &[TrainingExample]) -> Result<(), RegressError> {
        if examples.len() < 2 {
            return Err(RegressError::InsufficientData { needed: 2, got: examples.len() });
        }
        if all_features_identical(examples) {
            return Err(RegressError::DegenerateData);
        }
        let x = DMatrix::from_fn(examples.len(), 3, |r, c| if c == 0 { 1.0 } else { examples[r].features[c - 1] });
        let y = DVector::from_iterator(examples.len(), examples.iter().map(|e| e.label));
        // minimum-norm least squares; handles collinear features
        let solution = x.svd(true, true).solve(&y, 1e-12).map_err(|e| RegressError::InvalidParameter(e.into()))?;
        self.coefficients = Some([solution[0], solution[1], solution[2]]);
        Ok(())
    }

    fn predict(&self, x: Features) -> Result<f64, RegressError> {
        let [b, w1, w2] = self.coefficients.ok_or(RegressError::UntrainedModel)?;
        Ok(b + w1 * x[0] + w2 * x[1])
    }
}
