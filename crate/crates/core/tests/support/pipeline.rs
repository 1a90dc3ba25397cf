//! The weighted pipeline against the naive majority on the bundled synthetic sets.
#![allow(dead_code)]

use ontoqual_core::lexicon::HashEmbedder;
use ontoqual_core::regress::{cv_evaluate, FoldPlan, Model, TrainingExample};
use ontoqual_core::synthetic::{generate, Domain};

pub fn examples(domain: Domain) -> Vec<TrainingExample> {
    let set = generate(domain, 7);
    set.examples(&set.config(), &HashEmbedder::default()).unwrap()
}

/// 7 folds of 4 with validation fold (t + 1) mod 7, and every regressor
/// beating the naive majority on test accuracy. Returns a summary.
pub fn weighted_cv_beats_majority() -> String {
    let mut summary = Vec::new();
    for domain in [Domain::Pizza, Domain::Security] {
        let set = generate(domain, 7);
        let ex = examples(domain);
        let plan = FoldPlan::new(ex.len(), 7, 7).unwrap();
        assert_eq!(plan.folds.len(), 7);
        assert!(plan.folds.iter().all(|f| f.len() == 4));
        for t in 0..7 {
            let roles = plan.roles(t);
            assert_eq!((roles.test, roles.validation), (t, (t + 1) % 7));
            assert_eq!(roles.train.len(), 20);
        }
        let naive = cv_evaluate(&ex, &set.matrix, &set.gold, &Model::Uniform, &plan).unwrap();
        let mut line = format!("{} naive {:.3}", domain.name(), naive.test_accuracy);
        for model in [Model::linear(), Model::knn(3), Model::svr()] {
            let r = cv_evaluate(&ex, &set.matrix, &set.gold, &model, &plan).unwrap();
            assert!(
                r.test_accuracy > naive.test_accuracy,
                "{} {}: {} vs naive {}",
                domain.name(),
                r.model,
                r.test_accuracy,
                naive.test_accuracy
            );
            line += &format!(", {} {:.3}", model.family(), r.test_accuracy);
        }
        summary.push(line);
    }
    summary.join("; ")
}
