//! Predictions produced by classifiers outside the toolkit.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use super::experiment::{aggregate_runs, ExperimentReport, ExperimentRun, TraitDataset};
use super::{delta_imbalance, f1_macro, prediction_shift, random_baseline, random_baseline_with, BaselineSampling};
use crate::error::{Error, Result};
use crate::seed::derive_seed;

/// run id → document id → predicted label text.
pub type ExternalPredictions = BTreeMap<String, BTreeMap<String, String>>;

#[derive(Deserialize)]
struct Row {
    document_id: String,
    run_id: String,
    predicted: String,
}

/// Read a CSV with header `document_id,run_id,predicted`.
pub fn load_external_predictions(path: impl AsRef<Path>) -> Result<ExternalPredictions> {
    let path = path.as_ref();
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::malformed(path, 0, e.to_string()))?;
    let mut out = ExternalPredictions::new();
    for (i, row) in rdr.deserialize::<Row>().enumerate() {
        let row = row.map_err(|e| Error::malformed(path, i + 2, e.to_string()))?;
        if out.entry(row.run_id.clone()).or_default().insert(row.document_id.clone(), row.predicted).is_some() {
            return Err(Error::malformed(
                path,
                i + 2,
                format!("duplicate prediction for `{}` in run `{}`", row.document_id, row.run_id),
            ));
        }
    }
    Ok(out)
}

/// Score external predictions as experiment runs. Each run must predict
/// a set of originals together with their rewrites; labels are class
/// names or class indices.
pub fn evaluate_external(
    ds: &TraitDataset,
    preds: &ExternalPredictions,
    seed: u64,
    baseline_trials: usize,
    min_successful_runs: usize,
) -> Result<ExperimentReport> {
    let classes = &ds.labeling.classes;
    let parse = |s: &str| -> Result<usize> {
        classes
            .iter()
            .position(|c| c == s)
            .or_else(|| s.parse::<usize>().ok().filter(|&i| i < classes.len()))
            .ok_or_else(|| Error::invalid(format!("unknown predicted label `{s}`")))
    };
    let mut runs = Vec::new();
    for (r, (run_id, map)) in preds.iter().enumerate() {
        let mut test = Vec::new();
        let mut po = Vec::new();
        let mut pr = Vec::new();
        for i in 0..ds.len() {
            let o = map.get(&ds.original_ids[i]);
            let w = map.get(&ds.rewrite_ids[i]);
            match (o, w) {
                (Some(o), Some(w)) => {
                    test.push(i);
                    po.push(parse(o)?);
                    pr.push(parse(w)?);
                }
                (Some(_), None) => {
                    return Err(Error::invalid(format!(
                        "run `{run_id}` predicts `{}` but not its rewrite",
                        ds.original_ids[i]
                    )))
                }
                _ => {}
            }
        }
        if test.is_empty() {
            return Err(Error::insufficient(format!("run `{run_id}` covers no dataset documents")));
        }
        let labels: Vec<usize> = test.iter().map(|&i| ds.labels()[i]).collect();
        let f1_original = f1_macro(&po, &labels)?;
        let bseed = derive_seed(seed, &[r as u64]);
        let baseline = random_baseline(&labels, bseed, baseline_trials);
        let baseline_uniform = random_baseline_with(&labels, bseed, baseline_trials, BaselineSampling::Uniform);
        runs.push(ExperimentRun {
            seed: r as u64,
            fold: 0,
            reg: f64::NAN,
            f1_original,
            f1_rewrite: f1_macro(&pr, &labels)?,
            delta_original: delta_imbalance(&po, classes.len())?,
            delta_rewrite: delta_imbalance(&pr, classes.len())?,
            baseline,
            baseline_uniform,
            success: f1_original > baseline,
            shift: prediction_shift(&po, &pr, &labels)?,
            test_indices: test,
            original_predictions: po,
            rewrite_predictions: pr,
        });
    }
    let (aggregate, withheld) = aggregate_runs(&runs, min_successful_runs);
    Ok(ExperimentReport {
        trait_name: ds.labeling.trait_name.clone(),
        n_items: ds.len(),
        n_classes: classes.len(),
        runs,
        aggregate,
        withheld,
    })
}
