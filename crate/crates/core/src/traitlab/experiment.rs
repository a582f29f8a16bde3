use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::linear::{train_classifier, Classifier, ModelKind};
use super::tfidf::{tfidf_fit, SparseVector};
use super::{
    categorical_labeling, delta_imbalance, f1_macro, kfold_split, median_split_labeling, prediction_shift,
    random_baseline, random_baseline_with, BaselineSampling, ShiftCounts, TraitLabeling,
};
use crate::corpus::{tokenize, Document, LabelValue, TokenStream};
use crate::error::{Error, Result};
use crate::seed::derive_seed;
use crate::stats::descriptive::{mean, std_dev};
use crate::stats::{t_test, wilcoxon_signed_rank, Distribution, TTestMode, TestResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Featurization {
    Tfidf,
    /// Ingested document embeddings used as dense features.
    Embedding,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub classifier: ModelKind,
    pub featurization: Featurization,
    pub k: usize,
    pub seeds: Vec<u64>,
    /// L2 strengths tried on the validation part of each fold.
    pub reg_grid: Vec<f64>,
    pub baseline_trials: usize,
    pub min_successful_runs: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            classifier: ModelKind::Logistic,
            featurization: Featurization::Tfidf,
            k: 5,
            seeds: (0..40).collect(),
            reg_grid: vec![1e-4, 1e-3, 1e-2],
            baseline_trials: 200,
            min_successful_runs: 20,
        }
    }
}

/// Aligned originals and their single rewrite, labeled for one trait.
#[derive(Debug, Clone)]
pub struct TraitDataset {
    pub original_ids: Vec<String>,
    pub rewrite_ids: Vec<String>,
    pub originals: Vec<TokenStream>,
    pub rewrites: Vec<TokenStream>,
    pub original_embeddings: Option<Vec<Vec<f64>>>,
    pub rewrite_embeddings: Option<Vec<Vec<f64>>>,
    pub labeling: TraitLabeling,
}

impl TraitDataset {
    /// Build from (original, rewrite) pairs. Originals without the trait
    /// label are dropped; numeric traits are median-split, string traits
    /// become one class per category.
    pub fn from_pairs(pairs: &[(Document, Document)], trait_name: &str) -> Result<Self> {
        let kept: Vec<&(Document, Document)> = pairs.iter().filter(|(o, _)| o.labels.contains_key(trait_name)).collect();
        if kept.is_empty() {
            return Err(Error::insufficient(format!("trait `{trait_name}` is absent from the document labels")));
        }
        let values: Vec<&LabelValue> = kept.iter().map(|(o, _)| &o.labels[trait_name]).collect();
        let labeling = if values.iter().all(|v| v.as_number().is_some()) {
            let nums: Vec<f64> = values.iter().filter_map(|v| v.as_number()).collect();
            median_split_labeling(trait_name, &nums)?
        } else {
            let cats: Vec<String> = values.iter().map(|v| v.as_category()).collect();
            categorical_labeling(trait_name, &cats)?
        };
        let originals = kept.iter().map(|(o, _)| tokenize(o)).collect::<Result<_>>()?;
        let rewrites = kept.iter().map(|(_, r)| tokenize(r)).collect::<Result<_>>()?;
        let emb = |f: &dyn Fn(&(Document, Document)) -> &Document| -> Option<Vec<Vec<f64>>> {
            kept.iter().map(|p| f(p).embedding.clone()).collect()
        };
        Ok(TraitDataset {
            original_ids: kept.iter().map(|(o, _)| o.id.clone()).collect(),
            rewrite_ids: kept.iter().map(|(_, r)| r.id.clone()).collect(),
            originals,
            rewrites,
            original_embeddings: emb(&|p| &p.0),
            rewrite_embeddings: emb(&|p| &p.1),
            labeling,
        })
    }

    /// Pair every original with its unique rewrite; an original with no
    /// rewrite or several is an error.
    pub fn from_corpora(originals: &[Document], rewrites: &[Document], trait_name: &str) -> Result<Self> {
        let pairing = crate::corpus::pair_rewrites(originals, rewrites)?;
        if let Some(id) = pairing.unpaired_originals.first() {
            return Err(Error::invalid(format!("original `{id}` has no rewrite")));
        }
        let mut seen = std::collections::HashSet::new();
        for (o, _) in &pairing.pairs {
            if !seen.insert(o.id.as_str()) {
                return Err(Error::invalid(format!(
                    "original `{}` has several rewrites; select one llm/prompt cell",
                    o.id
                )));
            }
        }
        Self::from_pairs(&pairing.pairs, trait_name)
    }

    pub fn len(&self) -> usize {
        self.originals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.originals.is_empty()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labeling.labels
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRun {
    pub seed: u64,
    pub fold: usize,
    pub reg: f64,
    pub f1_original: f64,
    pub f1_rewrite: f64,
    pub delta_original: f64,
    pub delta_rewrite: f64,
    /// Empirical-frequency random baseline; decides `success`.
    pub baseline: f64,
    pub baseline_uniform: f64,
    pub success: bool,
    pub shift: ShiftCounts,
    pub test_indices: Vec<usize>,
    pub original_predictions: Vec<usize>,
    pub rewrite_predictions: Vec<usize>,
}

/// Summary over successful runs, mirroring the usual erosion table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub n_successful: usize,
    pub mean_f1_original: f64,
    pub mean_f1_rewrite: f64,
    /// Mean of F1_original − F1_rewrite.
    pub mean_f1_drop: f64,
    pub drop_se: f64,
    pub drop_ci_low: f64,
    pub drop_ci_high: f64,
    pub f1_test: Option<TestResult>,
    pub mean_baseline: f64,
    pub mean_baseline_uniform: f64,
    pub mean_delta_original: f64,
    pub mean_delta_rewrite: f64,
    pub delta_test: Option<TestResult>,
    pub mean_zero_to_one: f64,
    pub mean_one_to_zero: f64,
    pub shift_test: Option<TestResult>,
    /// Reasons a test was not computed.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub trait_name: String,
    pub n_items: usize,
    pub n_classes: usize,
    pub runs: Vec<ExperimentRun>,
    pub aggregate: Option<Aggregate>,
    pub withheld: Option<String>,
}

fn features(ds: &TraitDataset, fz: Featurization, fit_on: &[usize]) -> Result<(Vec<SparseVector>, Vec<SparseVector>, usize)> {
    match fz {
        Featurization::Tfidf => {
            let fit_docs: Vec<&TokenStream> = fit_on.iter().map(|&i| &ds.originals[i]).collect();
            let model = tfidf_fit(&fit_docs)?;
            let o = ds.originals.iter().map(|t| model.transform(t)).collect();
            let r = ds.rewrites.iter().map(|t| model.transform(t)).collect();
            Ok((o, r, model.dim()))
        }
        Featurization::Embedding => {
            let (Some(oe), Some(re)) = (&ds.original_embeddings, &ds.rewrite_embeddings) else {
                return Err(Error::insufficient("embedding featurization needs embeddings on every document"));
            };
            let dim = oe.first().map_or(0, Vec::len);
            if dim == 0 || oe.iter().chain(re).any(|e| e.len() != dim) {
                return Err(Error::invalid("embeddings have inconsistent dimensions"));
            }
            let o = oe.iter().map(|e| SparseVector::from_dense(e)).collect();
            let r = re.iter().map(|e| SparseVector::from_dense(e)).collect();
            Ok((o, r, dim))
        }
    }
}

fn fit(cfg: &ExperimentConfig, x: &[SparseVector], dim: usize, labels: &[usize], n_classes: usize, idx: &[usize], reg: f64, seed: u64) -> Result<Classifier> {
    let xs: Vec<SparseVector> = idx.iter().map(|&i| x[i].clone()).collect();
    let ys: Vec<usize> = idx.iter().map(|&i| labels[i]).collect();
    train_classifier(cfg.classifier, &xs, dim, &ys, n_classes, reg, seed)
}

fn one_run(ds: &TraitDataset, cfg: &ExperimentConfig, seed: u64, fold_idx: usize, fold: &super::Fold) -> Result<ExperimentRun> {
    let labels = ds.labels();
    let n_classes = ds.labeling.n_classes();
    let run_seed = derive_seed(seed, &[fold_idx as u64]);
    let mut fit_idx: Vec<usize> = fold.train.iter().chain(&fold.validation).copied().collect();
    fit_idx.sort_unstable();
    let (xo, xr, dim) = features(ds, cfg.featurization, &fit_idx)?;

    let mut reg = cfg.reg_grid[0];
    if !fold.validation.is_empty() && cfg.reg_grid.len() > 1 {
        let val_labels: Vec<usize> = fold.validation.iter().map(|&i| labels[i]).collect();
        let mut best = f64::NEG_INFINITY;
        for &r in &cfg.reg_grid {
            let m = fit(cfg, &xo, dim, labels, n_classes, &fold.train, r, run_seed)?;
            let preds: Vec<usize> = fold.validation.iter().map(|&i| m.predict(&xo[i])).collect();
            let f = f1_macro(&preds, &val_labels)?;
            if f > best {
                best = f;
                reg = r;
            }
        }
    }
    let model = fit(cfg, &xo, dim, labels, n_classes, &fit_idx, reg, run_seed)?;
    let test_labels: Vec<usize> = fold.test.iter().map(|&i| labels[i]).collect();
    let po: Vec<usize> = fold.test.iter().map(|&i| model.predict(&xo[i])).collect();
    let pr: Vec<usize> = fold.test.iter().map(|&i| model.predict(&xr[i])).collect();
    let f1_original = f1_macro(&po, &test_labels)?;
    let baseline = random_baseline(&test_labels, run_seed, cfg.baseline_trials);
    let baseline_uniform = random_baseline_with(&test_labels, run_seed, cfg.baseline_trials, BaselineSampling::Uniform);
    Ok(ExperimentRun {
        seed,
        fold: fold_idx,
        reg,
        f1_original,
        f1_rewrite: f1_macro(&pr, &test_labels)?,
        delta_original: delta_imbalance(&po, n_classes)?,
        delta_rewrite: delta_imbalance(&pr, n_classes)?,
        baseline,
        baseline_uniform,
        success: f1_original > baseline,
        shift: prediction_shift(&po, &pr, &test_labels)?,
        test_indices: fold.test.clone(),
        original_predictions: po,
        rewrite_predictions: pr,
    })
}

/// Train on originals and evaluate on originals and rewrites for every
/// seed × fold. Folds are re-drawn for each seed.
pub fn run_experiment(ds: &TraitDataset, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    if cfg.seeds.is_empty() || cfg.reg_grid.is_empty() {
        return Err(Error::invalid("experiment needs at least one seed and one regularization value"));
    }
    if ds.originals.len() != ds.rewrites.len() {
        return Err(Error::invalid("every original needs a rewrite"));
    }
    let jobs: Vec<(u64, usize, super::Fold)> = cfg
        .seeds
        .iter()
        .map(|&s| Ok(kfold_split(ds.labels(), cfg.k, s)?.into_iter().enumerate().map(move |(i, f)| (s, i, f))))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let runs = jobs
        .par_iter()
        .map(|(s, i, f)| one_run(ds, cfg, *s, *i, f))
        .collect::<Result<Vec<_>>>()?;
    let (aggregate, withheld) = aggregate_runs(&runs, cfg.min_successful_runs);
    Ok(ExperimentReport {
        trait_name: ds.labeling.trait_name.clone(),
        n_items: ds.len(),
        n_classes: ds.labeling.n_classes(),
        runs,
        aggregate,
        withheld,
    })
}

pub(crate) fn aggregate_runs(runs: &[ExperimentRun], min_successful: usize) -> (Option<Aggregate>, Option<String>) {
    let ok: Vec<&ExperimentRun> = runs.iter().filter(|r| r.success).collect();
    if ok.len() < min_successful.max(2) {
        return (
            None,
            Some(format!("{} successful runs, fewer than the required {}", ok.len(), min_successful)),
        );
    }
    let col = |f: &dyn Fn(&ExperimentRun) -> f64| -> Vec<f64> { ok.iter().map(|r| f(r)).collect() };
    let fo = col(&|r| r.f1_original);
    let fr = col(&|r| r.f1_rewrite);
    let drop: Vec<f64> = fo.iter().zip(&fr).map(|(a, b)| a - b).collect();
    let n = drop.len() as f64;
    let se = std_dev(&drop) / n.sqrt();
    let crit = Distribution::StudentT { df: n - 1.0 }.quantile(0.975);
    let md = mean(&drop);
    let mut notes = Vec::new();
    let mut attempt = |name: &str, r: Result<TestResult>| match r {
        Ok(t) => Some(t),
        Err(e) => {
            notes.push(format!("{name}: {e}"));
            None
        }
    };
    let dor = col(&|r| r.delta_original);
    let drw = col(&|r| r.delta_rewrite);
    let z1 = col(&|r| r.shift.zero_to_one as f64);
    let o1 = col(&|r| r.shift.one_to_zero as f64);
    let f1_test = attempt("f1 paired t", t_test(&fo, &fr, TTestMode::Paired));
    let delta_test = attempt("delta wilcoxon", wilcoxon_signed_rank(&drw, &dor));
    let shift_test = attempt("shift paired t", t_test(&z1, &o1, TTestMode::Paired));
    (
        Some(Aggregate {
            n_successful: ok.len(),
            mean_f1_original: mean(&fo),
            mean_f1_rewrite: mean(&fr),
            mean_f1_drop: md,
            drop_se: se,
            drop_ci_low: md - crit * se,
            drop_ci_high: md + crit * se,
            f1_test,
            mean_baseline: mean(&col(&|r| r.baseline)),
            mean_baseline_uniform: mean(&col(&|r| r.baseline_uniform)),
            mean_delta_original: mean(&dor),
            mean_delta_rewrite: mean(&drw),
            delta_test,
            mean_zero_to_one: mean(&z1),
            mean_one_to_zero: mean(&o1),
            shift_test,
            notes,
        }),
        None,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn corpus(n: usize, identical: bool) -> Vec<(Document, Document)> {
        let d = NaiveDate::from_ymd_opt(2024, 3, 1).unwrap();
        (0..n)
            .map(|i| {
                let trait_v = i as f64;
                let marker = if i >= n / 2 { "alpha beta" } else { "gamma delta" };
                let filler = ["one", "two", "three", "four", "five"][i % 5];
                let mut o = Document::new(format!("o{i}"), format!("{marker} {filler} common words"), d);
                o.labels.insert("t".into(), LabelValue::Number(trait_v));
                let text = if identical { o.text.clone() } else { format!("{filler} common words") };
                let mut r = Document::new(format!("r{i}"), text, d);
                r.rewrite_of = Some(o.id.clone());
                (o, r)
            })
            .collect()
    }

    #[test]
    fn identical_rewrites_have_zero_drop() {
        let ds = TraitDataset::from_pairs(&corpus(40, true), "t").unwrap();
        let cfg = ExperimentConfig {
            seeds: vec![1, 2, 3, 4],
            min_successful_runs: 5,
            ..Default::default()
        };
        let rep = run_experiment(&ds, &cfg).unwrap();
        assert!(rep.runs.iter().all(|r| r.f1_original == r.f1_rewrite));
        let agg = rep.aggregate.unwrap();
        assert!(agg.f1_test.is_none());
        assert!(agg.notes.iter().any(|n| n.contains("zero variance")));
    }

    #[test]
    fn deterministic_runs() {
        let ds = TraitDataset::from_pairs(&corpus(40, false), "t").unwrap();
        let cfg = ExperimentConfig {
            classifier: ModelKind::Svm,
            seeds: vec![5, 6],
            min_successful_runs: 2,
            ..Default::default()
        };
        let a = run_experiment(&ds, &cfg).unwrap();
        let b = run_experiment(&ds, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.runs.len(), 10);
    }

    #[test]
    fn absent_trait_is_reported() {
        let err = TraitDataset::from_pairs(&corpus(10, true), "missing").unwrap_err();
        assert!(err.to_string().contains("missing"));
    }
}
