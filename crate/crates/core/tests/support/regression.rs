//! Exactness oracles for the regressors.
#![allow(dead_code)]

use ontoqual_core::regress::{Knn, Linear, Regressor, Svr, TrainingExample};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

pub fn ex(x: [f64; 2], y: f64) -> TrainingExample {
    TrainingExample { handle: String::new(), features: x, label: y }
}

pub fn objective(w: [f64; 2], b: f64, data: &[TrainingExample], c: f64, eps: f64) -> f64 {
    let mut total = 0.5 * (w[0] * w[0] + w[1] * w[1]);
    for e in data {
        let r = e.label - (w[0] * e.features[0] + w[1] * e.features[1] + b);
        if r.abs() > eps {
            total += c * (r.abs() - eps);
        }
    }
    total
}

/// The loss is piecewise linear in b, so its minimum sits on a breakpoint.
pub fn best_over_b(w: [f64; 2], data: &[TrainingExample], c: f64, eps: f64) -> f64 {
    data.iter()
        .flat_map(|e| {
            let fit = w[0] * e.features[0] + w[1] * e.features[1];
            [e.label - fit - eps, e.label - fit + eps]
        })
        .map(|b| objective(w, b, data, c, eps))
        .fold(f64::INFINITY, f64::min)
}

pub fn ternary(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    for _ in 0..90 {
        let a = lo + (hi - lo) / 3.0;
        let b = hi - (hi - lo) / 3.0;
        if f(a) <= f(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

pub fn brute_force_minimum(data: &[TrainingExample], c: f64, eps: f64) -> f64 {
    ternary(-30.0, 30.0, |w0| ternary(-30.0, 30.0, |w1| best_over_b([w0, w1], data, c, eps)).1).1
}

/// Six points at several (C, epsilon) settings.
pub fn svr_matches_quadratic_oracle_on_six_points() {
    let data = vec![
        ex([0.1, 0.2], 0.35),
        ex([0.4, 0.1], 0.52),
        ex([0.7, 0.9], 1.20),
        ex([0.2, 0.8], 0.60),
        ex([0.9, 0.3], 1.05),
        ex([0.5, 0.5], 0.40),
    ];
    for (c, eps) in [(10.0, 0.01), (1.0, 0.05), (0.5, 0.0)] {
        let mut svr = Svr::new(c, eps);
        svr.fit(&data).unwrap();
        let fit = svr.fitted.clone().unwrap();
        let got = objective(fit.w, fit.b, &data, c, eps);
        let oracle = brute_force_minimum(&data, c, eps);
        assert!((got - oracle).abs() <= 1e-4, "C={c} eps={eps}: solver {got} vs oracle {oracle}");
    }
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() })
}

fn spread(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    xs.clone().fold(f64::NEG_INFINITY, f64::max) - xs.fold(f64::INFINITY, f64::min)
}

/// Noiseless labels from a random plane are reproduced with residual < 1e-9.
pub fn linear_recovers_noiseless_labels(cases: u32) {
    let strategy = (
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4..20),
        (-2.0f64..2.0, -2.0f64..2.0, -1.0f64..1.0),
    );
    let result = runner(cases).run(&strategy, |(pts, w)| {
        // keep the design well conditioned
        prop_assume!(spread(pts.iter().map(|p| p.0)) > 0.2 && spread(pts.iter().map(|p| p.1)) > 0.2);
        let data: Vec<_> = pts.iter().map(|&(a, b)| ex([a, b], w.0 * a + w.1 * b + w.2)).collect();
        let mut m = Linear::default();
        m.fit(&data).unwrap();
        for e in &data {
            prop_assert!((m.predict(e.features).unwrap() - e.label).abs() < 1e-9);
        }
        Ok(())
    });
    if let Err(e) = result {
        panic!("{e}");
    }
}

/// With k = 1 the prediction is the label of the closest training point.
pub fn one_neighbour_is_nearest_label(cases: u32) {
    let strategy = (
        prop::collection::vec(((-1.0f64..1.0, -1.0f64..1.0), 0.0f64..1.0), 1..20),
        (-1.0f64..1.0, -1.0f64..1.0),
    );
    let result = runner(cases).run(&strategy, |(points, q)| {
        let data: Vec<_> = points.iter().map(|&((a, b), y)| ex([a, b], y)).collect();
        let mut m = Knn::new(1);
        m.fit(&data).unwrap();
        let dist = |e: &TrainingExample| (e.features[0] - q.0).powi(2) + (e.features[1] - q.1).powi(2);
        let best = data.iter().min_by(|a, b| dist(a).total_cmp(&dist(b))).unwrap();
        prop_assert_eq!(m.predict([q.0, q.1]).unwrap(), best.label);
        Ok(())
    });
    if let Err(e) = result {
        panic!("{e}");
    }
}
