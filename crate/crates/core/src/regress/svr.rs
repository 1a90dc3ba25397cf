use serde::{Deserialize, Serialize};

use super::{all_features_identical, Features, RegressError, Regressor, TrainingExample};

/// Epsilon-insensitive support vector regression with a linear kernel.
///
/// Solved in the dual over `beta_i = alpha_i - alpha_i*` with
/// `sum(beta) = 0` and `|beta_i| <= C`, two coordinates at a time. Each step
/// picks the pair with the steepest feasible descent and minimizes the
/// piecewise-quadratic objective along it exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Svr {
    pub c: f64,
    pub epsilon: f64,
    pub max_iter: usize,
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fitted: Option<SvrFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrFit {
    pub w: Features,
    pub b: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl Default for Svr {
    fn default() -> Self {
        Svr { c: 10.0, epsilon: 0.01, max_iter: 10_000, tol: 1e-6, fitted: None }
    }
}

impl Svr {
    pub fn new(c: f64, epsilon: f64) -> Self {
        Svr { c, epsilon, ..Svr::default() }
    }

    pub fn is_trained(&self) -> bool {
        self.fitted.is_some()
    }
}

/// `0.5 |w|^2 + C * sum(max(0, |y - w.x - b| - epsilon))`.
pub fn svr_primal_objective(w: Features, b: f64, examples: &[TrainingExample], c: f64, epsilon: f64) -> f64 {
    let loss: f64 = examples
        .iter()
        .map(|e| {
            let r = e.label - w[0] * e.features[0] - w[1] * e.features[1] - b;
            (r.abs() - epsilon).max(0.0)
        })
        .sum();
    0.5 * (w[0] * w[0] + w[1] * w[1]) + c * loss
}

fn dot(a: Features, b: Features) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Right derivative of `eps * |beta|` when beta increases.
fn abs_up(beta: f64, eps: f64) -> f64 {
    if beta >= 0.0 { eps } else { -eps }
}

impl Regressor for Svr {
    fn fit(&mut self, examples: &[TrainingExample]) -> Result<(), RegressError> {
        let valid = self.c > 0.0 && self.epsilon >= 0.0 && self.tol > 0.0;
        if !valid {
            return Err(RegressError::InvalidParameter(format!(
                "C = {}, epsilon = {}, tol = {}",
                self.c, self.epsilon, self.tol
            )));
        }
        if examples.len() < 2 {
            return Err(RegressError::InsufficientData { needed: 2, got: examples.len() });
        }
        if all_features_identical(examples) {
            return Err(RegressError::DegenerateData);
        }
        let n = examples.len();
        let (c, eps) = (self.c, self.epsilon);
        let x: Vec<Features> = examples.iter().map(|e| e.features).collect();
        let y: Vec<f64> = examples.iter().map(|e| e.label).collect();
        let mut beta = vec![0.0; n];
        let mut w = [0.0, 0.0];

        let mut iterations = 0;
        let mut converged = false;
        while iterations < self.max_iter {
            // g_i: gradient of the smooth part, w.x_i - y_i
            let g: Vec<f64> = (0..n).map(|i| dot(w, x[i]) - y[i]).collect();
            let mut up: [(f64, usize); 2] = [(f64::INFINITY, usize::MAX); 2];
            let mut down: [(f64, usize); 2] = [(f64::INFINITY, usize::MAX); 2];
            for i in 0..n {
                if beta[i] < c {
                    push_best(&mut up, (g[i] + abs_up(beta[i], eps), i));
                }
                if beta[i] > -c {
                    push_best(&mut down, (-g[i] + abs_up(-beta[i], eps), i));
                }
            }
            let (slope, i, j) = if up[0].1 != down[0].1 {
                (up[0].0 + down[0].0, up[0].1, down[0].1)
            } else {
                let a = (up[0].0 + down[1].0, up[0].1, down[1].1);
                let b = (up[1].0 + down[0].0, up[1].1, down[0].1);
                if a.0 <= b.0 { a } else { b }
            };
            if i == usize::MAX || j == usize::MAX || slope >= -self.tol {
                converged = true;
                break;
            }

            let d = [x[i][0] - x[j][0], x[i][1] - x[j][1]];
            let eta = dot(d, d);
            let lin = g[i] - g[j];
            let lo = (-c - beta[i]).max(beta[j] - c);
            let hi = (c - beta[i]).min(beta[j] + c);
            let phi = |t: f64| 0.5 * eta * t * t + lin * t + eps * ((beta[i] + t).abs() + (beta[j] - t).abs());
            let mut candidates = vec![lo, hi, (-beta[i]).clamp(lo, hi), beta[j].clamp(lo, hi)];
            if eta > 0.0 {
                for s1 in [-1.0, 1.0] {
                    for s2 in [-1.0, 1.0] {
                        candidates.push((-(lin + eps * s1 - eps * s2) / eta).clamp(lo, hi));
                    }
                }
            }
            let t = candidates
                .into_iter()
                .min_by(|a, b| phi(*a).total_cmp(&phi(*b)).then(a.abs().total_cmp(&b.abs())))
                .unwrap_or(0.0);
            if t == 0.0 {
                converged = true;
                break;
            }
            beta[i] += t;
            beta[j] -= t;
            w[0] += t * d[0];
            w[1] += t * d[1];
            iterations += 1;
        }

        let b = best_intercept(w, &x, &y, eps);
        self.fitted = Some(SvrFit { w, b, iterations, converged });
        Ok(())
    }

    fn predict(&self, x: Features) -> Result<f64, RegressError> {
        let fit = self.fitted.as_ref().ok_or(RegressError::UntrainedModel)?;
        Ok(dot(fit.w, x) + fit.b)
    }
}

fn push_best(best: &mut [(f64, usize); 2], cand: (f64, usize)) {
    if cand.0 < best[0].0 {
        best[1] = best[0];
        best[0] = cand;
    } else if cand.0 < best[1].0 {
        best[1] = cand;
    }
}

/// Intercept minimizing the epsilon-insensitive loss for fixed `w`: the
/// middle of the minimizing interval of a convex piecewise-linear function.
fn best_intercept(w: Features, x: &[Features], y: &[f64], eps: f64) -> f64 {
    let residuals: Vec<f64> = x.iter().zip(y).map(|(xi, yi)| yi - dot(w, *xi)).collect();
    let loss = |b: f64| residuals.iter().map(|r| ((r - b).abs() - eps).max(0.0)).sum::<f64>();
    let points: Vec<f64> = residuals.iter().flat_map(|r| [r - eps, r + eps]).collect();
    let best = points.iter().map(|&p| loss(p)).fold(f64::INFINITY, f64::min);
    let tol = 1e-12 * (1.0 + best.abs());
    let argmins: Vec<f64> = points.iter().copied().filter(|&p| loss(p) <= best + tol).collect();
    let lo = argmins.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = argmins.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo + hi) / 2.0
}
