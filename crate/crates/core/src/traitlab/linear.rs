use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::tfidf::SparseVector;
use crate::error::{Error, Result};
use crate::seed::{rng_for, stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Logistic,
    Svm,
}

const LOGISTIC_MAX_ITER: usize = 400;
const LOGISTIC_TOL: f64 = 1e-7;
const SVM_EPOCHS: usize = 40;

/// Binary linear scorer; positive scores predict class 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearModel {
    pub kind: ModelKind,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub reg: f64,
    pub seed: u64,
}

impl LinearModel {
    pub fn score(&self, x: &SparseVector) -> f64 {
        x.dot(&self.weights) + self.bias
    }

    pub fn predict(&self, x: &SparseVector) -> usize {
        usize::from(self.score(x) > 0.0)
    }
}

/// Fit a binary model with L2 penalty `reg` on the weights (the bias is
/// unpenalized). Logistic regression uses Nesterov-accelerated full-batch
/// gradient descent; the SVM uses epoch-shuffled hinge subgradient steps
/// with step size 1/(reg·t + 1).
pub fn train_linear(kind: ModelKind, x: &[SparseVector], dim: usize, y: &[usize], reg: f64, seed: u64) -> Result<LinearModel> {
    if x.len() != y.len() {
        return Err(Error::invalid("train_linear: features and labels differ in length"));
    }
    if !(reg > 0.0 && reg.is_finite()) {
        return Err(Error::invalid(format!("train_linear: regularization {reg} must be positive")));
    }
    let ones = y.iter().filter(|&&l| l == 1).count();
    if y.iter().any(|&l| l > 1) {
        return Err(Error::invalid("train_linear expects binary labels"));
    }
    if ones < 2 || y.len() - ones < 2 {
        return Err(Error::insufficient("train_linear needs at least two examples of each class"));
    }
    if x.iter().any(|r| r.values.iter().any(|v| !v.is_finite()) || r.indices.iter().any(|&i| i >= dim)) {
        return Err(Error::invalid("train_linear: non-finite or out-of-range feature"));
    }
    let sign: Vec<f64> = y.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
    let (weights, bias) = match kind {
        ModelKind::Logistic => logistic(x, dim, &sign, reg),
        ModelKind::Svm => svm(x, dim, &sign, reg, seed),
    };
    Ok(LinearModel {
        kind,
        weights,
        bias,
        reg,
        seed,
    })
}

fn logistic_grad(x: &[SparseVector], s: &[f64], reg: f64, w: &[f64], b: f64, gw: &mut [f64]) -> f64 {
    let n = x.len() as f64;
    gw.iter_mut().zip(w).for_each(|(g, wi)| *g = reg * wi);
    let mut gb = 0.0;
    for (row, &yi) in x.iter().zip(s) {
        let m = yi * (row.dot(w) + b);
        // d/dm log(1 + e^{−m}) = −σ(−m)
        let c = -yi / (1.0 + m.exp()) / n;
        for (&j, v) in row.indices.iter().zip(&row.values) {
            gw[j] += c * v;
        }
        gb += c;
    }
    gb
}

fn logistic(x: &[SparseVector], dim: usize, s: &[f64], reg: f64) -> (Vec<f64>, f64) {
    let max_norm = x.iter().map(SparseVector::norm_sq).fold(0.0, f64::max);
    let step = 1.0 / (0.25 * (max_norm + 1.0) + reg);
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut w_prev = w.clone();
    let mut b_prev = b;
    let mut look = w.clone();
    let mut g = vec![0.0; dim];
    for k in 0..LOGISTIC_MAX_ITER {
        let mom = k as f64 / (k as f64 + 3.0);
        for j in 0..dim {
            look[j] = w[j] + mom * (w[j] - w_prev[j]);
        }
        let look_b = b + mom * (b - b_prev);
        let gb = logistic_grad(x, s, reg, &look, look_b, &mut g);
        let gnorm = (g.iter().map(|v| v * v).sum::<f64>() + gb * gb).sqrt();
        w_prev.copy_from_slice(&w);
        b_prev = b;
        for j in 0..dim {
            w[j] = look[j] - step * g[j];
        }
        b = look_b - step * gb;
        if gnorm < LOGISTIC_TOL {
            break;
        }
    }
    (w, b)
}

fn svm(x: &[SparseVector], dim: usize, s: &[f64], reg: f64, seed: u64) -> (Vec<f64>, f64) {
    // w = scale · v keeps the shrinkage step O(1)
    let mut v = vec![0.0; dim];
    let mut scale = 1.0;
    let mut b = 0.0;
    let mut order: Vec<usize> = (0..x.len()).collect();
    let mut rng = rng_for(seed, &[stream::SVM]);
    let mut t = 0.0;
    for _ in 0..SVM_EPOCHS {
        order.shuffle(&mut rng);
        for &i in &order {
            let eta = 1.0 / (reg * t + 1.0);
            t += 1.0;
            let margin = s[i] * (scale * x[i].dot(&v) + b);
            scale *= 1.0 - eta * reg;
            if margin < 1.0 {
                let c = eta * s[i] / scale;
                for (&j, val) in x[i].indices.iter().zip(&x[i].values) {
                    v[j] += c * val;
                }
                b += eta * s[i];
            }
            if scale < 1e-9 {
                v.iter_mut().for_each(|e| *e *= scale);
                scale = 1.0;
            }
        }
    }
    v.iter_mut().for_each(|e| *e *= scale);
    (v, b)
}

/// Binary model, or one-vs-rest binary models for more than two classes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classifier {
    pub n_classes: usize,
    pub models: Vec<LinearModel>,
}

impl Classifier {
    pub fn predict(&self, x: &SparseVector) -> usize {
        if self.n_classes == 2 {
            return self.models[0].predict(x);
        }
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for (c, m) in self.models.iter().enumerate() {
            let s = m.score(x);
            if s > best_score {
                best = c;
                best_score = s;
            }
        }
        best
    }

    pub fn predict_all(&self, x: &[SparseVector]) -> Vec<usize> {
        x.iter().map(|r| self.predict(r)).collect()
    }
}

pub fn train_classifier(
    kind: ModelKind,
    x: &[SparseVector],
    dim: usize,
    y: &[usize],
    n_classes: usize,
    reg: f64,
    seed: u64,
) -> Result<Classifier> {
    if n_classes < 2 {
        return Err(Error::insufficient("classifier needs at least two classes"));
    }
    let models = if n_classes == 2 {
        vec![train_linear(kind, x, dim, y, reg, seed)?]
    } else {
        (0..n_classes)
            .map(|c| {
                let yc: Vec<usize> = y.iter().map(|&l| usize::from(l == c)).collect();
                train_linear(kind, x, dim, &yc, reg, seed.wrapping_add(c as u64))
            })
            .collect::<Result<_>>()?
    };
    Ok(Classifier { n_classes, models })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn clusters(n: usize, seed: u64) -> (Vec<SparseVector>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..n {
            let c = i % 2;
            let mu = if c == 1 { 5.0 } else { -5.0 };
            let row: Vec<f64> = (0..3).map(|_| mu + rng.sample::<f64, _>(StandardNormal)).collect();
            x.push(SparseVector::from_dense(&row));
            y.push(c);
        }
        (x, y)
    }

    #[test]
    fn separable_clusters_fit_perfectly() {
        let (x, y) = clusters(60, 1);
        for kind in [ModelKind::Logistic, ModelKind::Svm] {
            let m = train_classifier(kind, &x, 3, &y, 2, 1e-3, 5).unwrap();
            assert_eq!(m.predict_all(&x), y, "{kind:?}");
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let (x, y) = clusters(40, 2);
        let a = train_linear(ModelKind::Svm, &x, 3, &y, 1e-2, 9).unwrap();
        let b = train_linear(ModelKind::Svm, &x, 3, &y, 1e-2, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_single_class() {
        let (x, _) = clusters(10, 3);
        assert!(train_linear(ModelKind::Logistic, &x, 3, &[1; 10], 1e-2, 0).is_err());
    }

    #[test]
    fn one_vs_rest() {
        let x: Vec<SparseVector> = (0..30)
            .map(|i| {
                let mut v = vec![0.0; 3];
                v[i % 3] = 1.0 + (i as f64) * 0.01;
                SparseVector::from_dense(&v)
            })
            .collect();
        let y: Vec<usize> = (0..30).map(|i| i % 3).collect();
        let m = train_classifier(ModelKind::Logistic, &x, 3, &y, 3, 1e-3, 0).unwrap();
        assert_eq!(m.predict_all(&x), y);
    }
}
