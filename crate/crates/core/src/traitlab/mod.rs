//! Trait classification on original texts and evaluation on rewrites.
//!
//! Labels come from a median split of z-scored trait values (or from
//! category names). Documents are featurized with TF-IDF fitted on the
//! original training texts, classified with L2-regularized logistic
//! regression or a linear SVM, and evaluated with F1-macro, the prediction
//! imbalance Δ and directional prediction shifts.

mod experiment;
mod external;
mod linear;
mod tfidf;

pub use experiment::{
    run_experiment, Aggregate, ExperimentConfig, ExperimentReport, ExperimentRun, Featurization, TraitDataset,
};
pub use external::{evaluate_external, load_external_predictions, ExternalPredictions};
pub use linear::{train_classifier, train_linear, Classifier, LinearModel, ModelKind};
pub use tfidf::{tfidf_fit, SparseVector, TfidfModel};

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::seed::{rng_for, stream};
use crate::stats::descriptive::{median, z_scores};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraitLabeling {
    pub trait_name: String,
    pub labels: Vec<usize>,
    /// Class names in index order.
    pub classes: Vec<String>,
    /// Median of the z-scores for median splits.
    pub split: Option<f64>,
}

impl TraitLabeling {
    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }
}

/// Binary low/high labels: 1 iff z > median(z). Ties at the median go low.
pub fn median_split(values: &[f64]) -> Result<Vec<usize>> {
    Ok(median_split_labeling("", values)?.labels)
}

pub fn median_split_labeling(trait_name: &str, values: &[f64]) -> Result<TraitLabeling> {
    if values.len() < 2 {
        return Err(Error::insufficient("median split needs at least two values"));
    }
    let z = z_scores(values).ok_or_else(|| Error::ZeroVariance(format!("trait `{trait_name}` is constant")))?;
    let m = median(&z);
    Ok(TraitLabeling {
        trait_name: trait_name.to_string(),
        labels: z.iter().map(|&v| usize::from(v > m)).collect(),
        classes: vec!["low".into(), "high".into()],
        split: Some(m),
    })
}

/// Class indices for categorical values, with classes sorted by name.
pub fn categorical_labeling(trait_name: &str, values: &[String]) -> Result<TraitLabeling> {
    let mut classes: Vec<String> = values.to_vec();
    classes.sort();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::insufficient(format!("trait `{trait_name}` has a single category")));
    }
    let labels = values.iter().map(|v| classes.binary_search(v).expect("present")).collect();
    Ok(TraitLabeling {
        trait_name: trait_name.to_string(),
        labels,
        classes,
        split: None,
    })
}

/// Unweighted mean of per-class F1 over classes present in either input.
pub fn f1_macro(predictions: &[usize], labels: &[usize]) -> Result<f64> {
    if predictions.len() != labels.len() {
        return Err(Error::invalid("f1_macro: length mismatch"));
    }
    if labels.is_empty() {
        return Err(Error::invalid("f1_macro: empty input"));
    }
    let n_classes = predictions.iter().chain(labels).max().map_or(0, |m| m + 1);
    let mut tp = vec![0usize; n_classes];
    let mut fp = vec![0usize; n_classes];
    let mut fneg = vec![0usize; n_classes];
    for (&p, &l) in predictions.iter().zip(labels) {
        if p == l {
            tp[p] += 1;
        } else {
            fp[p] += 1;
            fneg[l] += 1;
        }
    }
    let mut sum = 0.0;
    let mut present = 0;
    for c in 0..n_classes {
        if tp[c] + fp[c] + fneg[c] == 0 {
            continue;
        }
        present += 1;
        sum += 2.0 * tp[c] as f64 / (2 * tp[c] + fp[c] + fneg[c]) as f64;
    }
    Ok(sum / present as f64)
}

/// |P_max − P_min| / (P_max + P_min) over the prediction counts of classes
/// `0..n_classes` (zero counts included); for two classes this is
/// |P₁ − P₀| / (P₁ + P₀).
pub fn delta_imbalance(predictions: &[usize], n_classes: usize) -> Result<f64> {
    if predictions.is_empty() {
        return Err(Error::invalid("delta_imbalance: no predictions"));
    }
    let n_classes = n_classes.max(predictions.iter().max().map_or(0, |m| m + 1));
    let mut counts = vec![0usize; n_classes.max(2)];
    for &p in predictions {
        counts[p] += 1;
    }
    let hi = *counts.iter().max().unwrap() as f64;
    let lo = *counts.iter().min().unwrap() as f64;
    Ok((hi - lo) / (hi + lo))
}

/// Changes among items predicted correctly on the original texts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ShiftCounts {
    pub correct_on_original: usize,
    pub zero_to_one: usize,
    pub one_to_zero: usize,
    /// All class changes, including multi-class ones.
    pub changed: usize,
}

pub fn prediction_shift(orig_preds: &[usize], rewrite_preds: &[usize], labels: &[usize]) -> Result<ShiftCounts> {
    if orig_preds.len() != rewrite_preds.len() || orig_preds.len() != labels.len() {
        return Err(Error::invalid("prediction_shift: misaligned sequences"));
    }
    let mut s = ShiftCounts::default();
    for ((&o, &r), &l) in orig_preds.iter().zip(rewrite_preds).zip(labels) {
        if o != l {
            continue;
        }
        s.correct_on_original += 1;
        if o != r {
            s.changed += 1;
            match (o, r) {
                (0, 1) => s.zero_to_one += 1,
                (1, 0) => s.one_to_zero += 1,
                _ => {}
            }
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineSampling {
    /// Draw classes with their observed label frequencies.
    Empirical,
    Uniform,
}

/// Mean F1-macro of random predictions over `trials` seeded draws.
/// Single-class labels give 1.0.
pub fn random_baseline(labels: &[usize], seed: u64, trials: usize) -> f64 {
    random_baseline_with(labels, seed, trials, BaselineSampling::Empirical)
}

pub fn random_baseline_with(labels: &[usize], seed: u64, trials: usize, sampling: BaselineSampling) -> f64 {
    if labels.is_empty() || trials == 0 {
        return f64::NAN;
    }
    let n_classes = labels.iter().max().unwrap() + 1;
    let mut counts = vec![0usize; n_classes];
    for &l in labels {
        counts[l] += 1;
    }
    if counts.iter().filter(|&&c| c > 0).count() == 1 && sampling == BaselineSampling::Empirical {
        return 1.0;
    }
    let mut rng = rng_for(seed, &[stream::BASELINE]);
    let mut total = 0.0;
    let mut preds = vec![0usize; labels.len()];
    for _ in 0..trials {
        for p in preds.iter_mut() {
            *p = match sampling {
                BaselineSampling::Uniform => rng.random_range(0..n_classes),
                BaselineSampling::Empirical => {
                    // label of a uniformly drawn item is a draw from the empirical distribution
                    labels[rng.random_range(0..labels.len())]
                }
            };
        }
        total += f1_macro(&preds, labels).expect("aligned");
    }
    total / trials as f64
}

/// One cross-validation fold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fold {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

/// Stratified k-fold assignment. Fold i tests on part i and validates on
/// part (i + 1) mod k; the remaining k − 2 parts train. With k = 2 there
/// is no validation part.
pub fn kfold_split(labels: &[usize], k: usize, seed: u64) -> Result<Vec<Fold>> {
    use rand::seq::SliceRandom;
    if k < 2 {
        return Err(Error::invalid("kfold_split needs k ≥ 2"));
    }
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut part = vec![0usize; labels.len()];
    let mut rng = rng_for(seed, &[stream::FOLDS]);
    let mut offset = 0;
    for c in 0..n_classes {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
        if idx.is_empty() {
            continue;
        }
        if idx.len() < k {
            return Err(Error::insufficient(format!("class {c} has {} items, fewer than k = {k}", idx.len())));
        }
        idx.shuffle(&mut rng);
        for (j, &i) in idx.iter().enumerate() {
            part[i] = (j + offset) % k;
        }
        offset = (offset + idx.len()) % k;
    }
    Ok((0..k)
        .map(|f| {
            let v = if k > 2 { (f + 1) % k } else { usize::MAX };
            let pick = |want: &dyn Fn(usize) -> bool| (0..labels.len()).filter(|&i| want(part[i])).collect();
            Fold {
                test: pick(&|p| p == f),
                validation: pick(&|p| p == v),
                train: pick(&|p| p != f && p != v),
            }
        })
        .collect())
}
