use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::vote::{accuracy, weighted_vote, DecisionMatrix, Gold};
use super::{Model, RegressError, Regressor, TrainingExample};

/// A partition of example indices into folds of near-equal size. For test
/// fold `t` the validation fold is `(t + 1) mod k`; the rest train.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FoldPlan {
    pub folds: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldRoles {
    pub test: usize,
    pub validation: usize,
    pub train: Vec<usize>,
}

impl FoldPlan {
    /// Shuffles `0..n` with `seed` and deals the indices round-robin into
    /// `k` folds.
    pub fn new(n: usize, k: usize, seed: u64) -> Result<Self, RegressError> {
        if k < 3 {
            return Err(RegressError::InvalidParameter("need at least 3 folds".into()));
        }
        if n < k {
            return Err(RegressError::InsufficientData { needed: k, got: n });
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut folds = vec![Vec::new(); k];
        for (pos, idx) in order.into_iter().enumerate() {
            folds[pos % k].push(idx);
        }
        for f in &mut folds {
            f.sort_unstable();
        }
        Ok(FoldPlan { folds })
    }

    pub fn k(&self) -> usize {
        self.folds.len()
    }

    pub fn roles(&self, test: usize) -> FoldRoles {
        let k = self.k();
        let validation = (test + 1) % k;
        let train = (0..k).filter(|&f| f != test && f != validation).flat_map(|f| self.folds[f].iter().copied()).collect();
        FoldRoles { test, validation, train }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldResult {
    pub test_fold: usize,
    pub validation_fold: usize,
    pub val_accuracy: f64,
    pub test_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvResult {
    pub model: String,
    pub val_accuracy: f64,
    pub test_accuracy: f64,
    pub folds: Vec<FoldResult>,
}

fn check_alignment(examples: &[TrainingExample], matrix: &DecisionMatrix, gold: &Gold) -> Result<(), RegressError> {
    let handles: BTreeSet<&str> = examples.iter().map(|e| e.handle.as_str()).collect();
    if handles.len() != examples.len() {
        return Err(RegressError::FoldMisalignment("duplicate handles among examples".into()));
    }
    let validators: BTreeSet<&str> = matrix.validators().collect();
    if handles != validators {
        let missing: Vec<&&str> = validators.symmetric_difference(&handles).take(5).collect();
        return Err(RegressError::FoldMisalignment(format!("handles differ: {missing:?}")));
    }
    if let Some(item) = matrix.items.iter().find(|i| !gold.contains_key(*i)) {
        return Err(RegressError::MissingGold(item.clone()));
    }
    Ok(())
}

/// Accuracy of the weighted vote among `voters`, each weighted by the
/// model's clamped prediction.
fn vote_accuracy(
    model: &Model,
    voters: &[&TrainingExample],
    matrix: &DecisionMatrix,
    gold: &Gold,
) -> Result<f64, RegressError> {
    let mut weights = BTreeMap::new();
    for e in voters {
        weights.insert(e.handle.clone(), model.predict(e.features)?.clamp(0.0, 1.0));
    }
    let handles: Vec<&str> = voters.iter().map(|e| e.handle.as_str()).collect();
    let verdicts = weighted_vote(&matrix.restrict(&handles), &weights)?;
    let scored: Gold = matrix.items.iter().map(|i| (i.clone(), gold[i])).collect();
    accuracy(&verdicts, &scored)
}

/// Per fold: fit on the training folds, then score the validation and test
/// folds by voting among their validators only. Reports the means.
pub fn cv_evaluate(
    examples: &[TrainingExample],
    matrix: &DecisionMatrix,
    gold: &Gold,
    model: &Model,
    plan: &FoldPlan,
) -> Result<CvResult, RegressError> {
    check_alignment(examples, matrix, gold)?;
    if plan.folds.iter().flatten().any(|&i| i >= examples.len()) {
        return Err(RegressError::FoldMisalignment("fold index out of range".into()));
    }
    let mut folds = Vec::with_capacity(plan.k());
    for t in 0..plan.k() {
        let roles = plan.roles(t);
        let train: Vec<TrainingExample> = roles.train.iter().map(|&i| examples[i].clone()).collect();
        let fitted = model.fitted(&train)?;
        let pick = |f: usize| plan.folds[f].iter().map(|&i| &examples[i]).collect::<Vec<_>>();
        folds.push(FoldResult {
            test_fold: t,
            validation_fold: roles.validation,
            val_accuracy: vote_accuracy(&fitted, &pick(roles.validation), matrix, gold)?,
            test_accuracy: vote_accuracy(&fitted, &pick(t), matrix, gold)?,
        });
    }
    let k = folds.len() as f64;
    Ok(CvResult {
        model: model.describe(),
        val_accuracy: folds.iter().map(|f| f.val_accuracy).sum::<f64>() / k,
        test_accuracy: folds.iter().map(|f| f.test_accuracy).sum::<f64>() / k,
        folds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridResult {
    pub best: CvResult,
    pub all: Vec<CvResult>,
}

/// Runs every candidate and keeps the best validation accuracy; ties go to
/// the earlier candidate.
pub fn cv_grid(
    examples: &[TrainingExample],
    matrix: &DecisionMatrix,
    gold: &Gold,
    candidates: &[Model],
    plan: &FoldPlan,
) -> Result<GridResult, RegressError> {
    let mut all = Vec::with_capacity(candidates.len());
    for model in candidates {
        all.push(cv_evaluate(examples, matrix, gold, model, plan)?);
    }
    let best = all
        .iter()
        .enumerate()
        .fold(None::<(usize, f64)>, |best, (i, r)| match best {
            Some((_, v)) if v >= r.val_accuracy => best,
            _ => Some((i, r.val_accuracy)),
        })
        .map(|(i, _)| all[i].clone())
        .ok_or_else(|| RegressError::InvalidParameter("no candidate models".into()))?;
    Ok(GridResult { best, all })
}

/// Validators, their decisions and the reference answers used to score a
/// trained model.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalSet {
    pub examples: Vec<TrainingExample>,
    pub matrix: DecisionMatrix,
    pub gold: Gold,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub fraction: f64,
    pub train_size: usize,
    pub mean_accuracy: f64,
}

/// For each fraction, `trials` times: shuffle the training examples, fit on
/// the leading `round(fraction * n)`, and score on `eval`. Each
/// (fraction, trial) pair draws from its own generator derived from `seed`.
pub fn training_curve(
    train: &[TrainingExample],
    eval: &EvalSet,
    fractions: &[f64],
    trials: usize,
    model: &Model,
    seed: u64,
) -> Result<Vec<CurvePoint>, RegressError> {
    check_alignment(&eval.examples, &eval.matrix, &eval.gold)?;
    if trials == 0 {
        return Err(RegressError::InvalidParameter("trials must be positive".into()));
    }
    let voters: Vec<&TrainingExample> = eval.examples.iter().collect();
    let mut points = Vec::with_capacity(fractions.len());
    for (fi, &fraction) in fractions.iter().enumerate() {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(RegressError::InvalidParameter(format!("fraction {fraction} is outside (0, 1]")));
        }
        let size = (fraction * train.len() as f64).round() as usize;
        if size == 0 {
            return Err(RegressError::EmptySubset(fraction));
        }
        let mut total = 0.0;
        for t in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((fi as u64) << 32 | t as u64));
            let mut shuffled = train.to_vec();
            shuffled.shuffle(&mut rng);
            let fitted = model.fitted(&shuffled[..size])?;
            total += vote_accuracy(&fitted, &voters, &eval.matrix, &eval.gold)?;
        }
        points.push(CurvePoint { fraction, train_size: size, mean_accuracy: total / trials as f64 });
    }
    Ok(points)
}
