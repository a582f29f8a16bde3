//! Embedding cosine similarity between originals and rewrites, plus
//! rubric-rating summaries.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::stats::descriptive::{mean, quantile, std_dev};
use crate::stats::{gwet_ac1, AgreementResult};

/// Cosine of the angle between two vectors, clamped to [−1, 1].
pub fn cosine_similarity(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::invalid(format!("dimension mismatch: {} vs {}", u.len(), v.len())));
    }
    if u.is_empty() {
        return Err(Error::invalid("empty vectors"));
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::invalid("zero vector has no direction"));
    }
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairScore {
    pub original_id: String,
    pub rewrite_id: String,
    pub llm: Option<String>,
    pub prompt: Option<String>,
    pub cosine: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreSummary {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
    /// 10th through 90th percentiles.
    pub deciles: Vec<f64>,
    pub threshold: f64,
    pub fraction_at_or_above: f64,
}

impl ScoreSummary {
    pub fn new(scores: &[f64], threshold: f64) -> Option<Self> {
        if scores.is_empty() {
            return None;
        }
        let above = scores.iter().filter(|&&s| s >= threshold).count();
        Some(ScoreSummary {
            n: scores.len(),
            mean: mean(scores),
            median: quantile(scores, 0.5),
            min: scores.iter().copied().fold(f64::INFINITY, f64::min),
            max: scores.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            deciles: (1..10).map(|i| quantile(scores, i as f64 / 10.0)).collect(),
            threshold,
            fraction_at_or_above: above as f64 / scores.len() as f64,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarityReport {
    pub scores: Vec<PairScore>,
    pub skipped_missing_embedding: usize,
    pub overall: Option<ScoreSummary>,
    /// Keyed by "llm/prompt"; absent tags render as "-".
    pub by_group: BTreeMap<String, ScoreSummary>,
}

pub fn similarity_report(pairs: &[(Document, Document)], threshold: f64) -> Result<SimilarityReport> {
    let mut scores = Vec::new();
    let mut skipped = 0;
    for (orig, rw) in pairs {
        let (Some(a), Some(b)) = (&orig.embedding, &rw.embedding) else {
            skipped += 1;
            continue;
        };
        scores.push(PairScore {
            original_id: orig.id.clone(),
            rewrite_id: rw.id.clone(),
            llm: rw.llm_tag.clone(),
            prompt: rw.prompt_tag.map(|p| p.to_string()),
            cosine: cosine_similarity(a, b)?,
        });
    }
    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for s in &scores {
        let key = format!("{}/{}", s.llm.as_deref().unwrap_or("-"), s.prompt.as_deref().unwrap_or("-"));
        groups.entry(key).or_default().push(s.cosine);
    }
    let all: Vec<f64> = scores.iter().map(|s| s.cosine).collect();
    Ok(SimilarityReport {
        overall: ScoreSummary::new(&all, threshold),
        by_group: groups
            .into_iter()
            .filter_map(|(k, v)| ScoreSummary::new(&v, threshold).map(|s| (k, s)))
            .collect(),
        scores,
        skipped_missing_embedding: skipped,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatingSummary {
    pub mean: f64,
    /// Sample sd of per-item mean ratings; 0 with a single item.
    pub sd: f64,
    pub agreement: Option<AgreementResult>,
}

/// Summarize a rubric rating matrix (items × raters) on the 1–3 scale.
///
/// The mean is over all ratings. AC1 needs two or more items and raters,
/// otherwise it is omitted.
pub fn rating_summary(ratings: &[Vec<u32>]) -> Result<RatingSummary> {
    if ratings.is_empty() || ratings.iter().any(|r| r.is_empty()) {
        return Err(Error::invalid("empty rating matrix"));
    }
    if let Some(bad) = ratings.iter().flatten().find(|&&r| !(1..=3).contains(&r)) {
        return Err(Error::invalid(format!("rating {bad} outside 1..=3")));
    }
    let all: Vec<f64> = ratings.iter().flatten().map(|&r| r as f64).collect();
    let item_means: Vec<f64> = ratings
        .iter()
        .map(|r| r.iter().map(|&v| v as f64).sum::<f64>() / r.len() as f64)
        .collect();
    let sd = if item_means.len() > 1 { std_dev(&item_means) } else { 0.0 };
    let agreement = if ratings.len() >= 2 && ratings[0].len() >= 2 {
        Some(gwet_ac1(ratings, 3)?)
    } else {
        None
    };
    Ok(RatingSummary {
        mean: mean(&all),
        sd,
        agreement,
    })
}
