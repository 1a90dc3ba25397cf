//! Regression models mapping expertise features to scores, weighted
//! majority voting, and the cross-validation harness.

mod cv;
mod forest;
mod knn;
mod linear;
mod svr;
mod vote;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cv::{
    cv_evaluate, cv_grid, training_curve, CurvePoint, CvResult, EvalSet, FoldPlan, FoldResult, FoldRoles,
    GridResult,
};
pub use forest::Forest;
pub use knn::Knn;
pub use linear::Linear;
pub use svr::{svr_primal_objective, Svr};
pub use vote::{accuracy, naive_majority, vote_tallies, weighted_vote, Decision, DecisionMatrix, Gold, Tally, Verdict};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegressError {
    #[error("model has not been fitted")]
    UntrainedModel,
    #[error("need at least {needed} examples, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("all training examples have identical features")]
    DegenerateData,
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),
    #[error("no weight for validator `{0}`")]
    MissingWeight(String),
    #[error("weight of `{0}` must be finite and non-negative")]
    InvalidWeight(String),
    #[error("decision for unknown item `{0}`")]
    UnknownItem(String),
    #[error("gold standard has no answer for item `{0}`")]
    MissingGold(String),
    #[error("training examples do not match the decision matrix: {0}")]
    FoldMisalignment(String),
    #[error("a training fraction of {0} selects no examples")]
    EmptySubset(f64),
    #[error("invalid JSON: {0}")]
    Json(String),
}

/// (tweet_sim, friend_sim).
pub type Features = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingExample {
    #[serde(default)]
    pub handle: String,
    pub features: Features,
    /// Fraction of the validator's answers that matched the gold standard.
    pub label: f64,
}

/// Reads a JSON array of training examples.
pub fn parse_examples(text: &str) -> Result<Vec<TrainingExample>, RegressError> {
    serde_json::from_str(text).map_err(|e| RegressError::Json(e.to_string()))
}

pub trait Regressor {
    fn fit(&mut self, examples: &[TrainingExample]) -> Result<(), RegressError>;
    fn predict(&self, features: Features) -> Result<f64, RegressError>;
}

/// The available regressors, including two fixed baselines that need no
/// training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    /// Mean of the two features.
    Identity,
    /// Constant 1: every validator counts the same.
    Uniform,
    Linear(Linear),
    Knn(Knn),
    Svr(Svr),
    Forest(Forest),
}

impl Model {
    pub fn linear() -> Self {
        Model::Linear(Linear::default())
    }

    pub fn knn(k: usize) -> Self {
        Model::Knn(Knn::new(k))
    }

    pub fn svr() -> Self {
        Model::Svr(Svr::default())
    }

    pub fn forest(seed: u64) -> Self {
        Model::Forest(Forest::new(seed))
    }

    /// Untrained model for a family name. `majority` is an alias for
    /// `uniform`.
    pub fn from_name(name: &str, seed: u64) -> Result<Self, RegressError> {
        match name.to_ascii_lowercase().as_str() {
            "identity" => Ok(Model::Identity),
            "uniform" | "majority" => Ok(Model::Uniform),
            "linear" => Ok(Model::linear()),
            "knn" => Ok(Model::knn(3)),
            "svr" => Ok(Model::svr()),
            "forest" => Ok(Model::forest(seed)),
            other => Err(RegressError::InvalidParameter(format!("unknown regressor `{other}`"))),
        }
    }

    /// Model for `name`, fitted on `examples` when it needs training.
    pub fn trained(name: &str, seed: u64, examples: Option<&[TrainingExample]>) -> Result<Self, RegressError> {
        let model = Model::from_name(name, seed)?;
        if model.is_trained() {
            return Ok(model);
        }
        match examples {
            Some(examples) => model.fitted(examples),
            None => Err(RegressError::UntrainedModel),
        }
    }

    /// Short name of the model family.
    pub fn family(&self) -> &'static str {
        match self {
            Model::Identity => "identity",
            Model::Uniform => "uniform",
            Model::Linear(_) => "linear",
            Model::Knn(_) => "knn",
            Model::Svr(_) => "svr",
            Model::Forest(_) => "forest",
        }
    }

    /// Family plus hyperparameters.
    pub fn describe(&self) -> String {
        match self {
            Model::Knn(m) => format!("knn(k={})", m.k),
            Model::Svr(m) => format!("svr(C={}, epsilon={})", m.c, m.epsilon),
            Model::Forest(m) => format!("forest(trees={}, depth={})", m.trees, m.max_depth),
            other => other.family().to_owned(),
        }
    }

    pub fn is_trained(&self) -> bool {
        match self {
            Model::Identity | Model::Uniform => true,
            Model::Linear(m) => m.is_trained(),
            Model::Knn(m) => m.is_trained(),
            Model::Svr(m) => m.is_trained(),
            Model::Forest(m) => m.is_trained(),
        }
    }

    /// A fitted copy; `self` is left untouched.
    pub fn fitted(&self, examples: &[TrainingExample]) -> Result<Model, RegressError> {
        let mut m = self.clone();
        m.fit(examples)?;
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Model, RegressError> {
        serde_json::from_str(text).map_err(|e| RegressError::Json(e.to_string()))
    }
}

impl Regressor for Model {
    fn fit(&mut self, examples: &[TrainingExample]) -> Result<(), RegressError> {
        match self {
            Model::Identity | Model::Uniform => Ok(()),
            Model::Linear(m) => m.fit(examples),
            Model::Knn(m) => m.fit(examples),
            Model::Svr(m) => m.fit(examples),
            Model::Forest(m) => m.fit(examples),
        }
    }

    fn predict(&self, features: Features) -> Result<f64, RegressError> {
        match self {
            Model::Identity => Ok((features[0] + features[1]) / 2.0),
            Model::Uniform => Ok(1.0),
            Model::Linear(m) => m.predict(features),
            Model::Knn(m) => m.predict(features),
            Model::Svr(m) => m.predict(features),
            Model::Forest(m) => m.predict(features),
        }
    }
}

pub(crate) fn all_features_identical(examples: &[TrainingExample]) -> bool {
    examples.windows(2).all(|w| w[0].features == w[1].features)
}
