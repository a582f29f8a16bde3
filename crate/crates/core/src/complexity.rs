//! Per-document complexity features and the standardized composite.
//!
//! Lexical features are bag-of-words statistics over a [`TokenStream`];
//! dependency length comes from ingested parses. Entropy is in bits.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::{SentenceParse, TokenStream};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    Simpson,
    Shannon,
    DepLength,
    Ttr,
    HapaxRatio,
}

impl Feature {
    pub const ALL: [Feature; 5] = [
        Feature::Simpson,
        Feature::Shannon,
        Feature::DepLength,
        Feature::Ttr,
        Feature::HapaxRatio,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Feature::Simpson => "simpson",
            Feature::Shannon => "shannon",
            Feature::DepLength => "dep_length",
            Feature::Ttr => "ttr",
            Feature::HapaxRatio => "hapax_ratio",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityVector {
    pub source_id: String,
    pub simpson: f64,
    pub shannon: f64,
    pub dep_length: Option<f64>,
    pub ttr: f64,
    pub hapax_ratio: f64,
    pub hapax_count: usize,
}

impl ComplexityVector {
    pub fn get(&self, feature: Feature) -> Option<f64> {
        match feature {
            Feature::Simpson => Some(self.simpson),
            Feature::Shannon => Some(self.shannon),
            Feature::DepLength => self.dep_length,
            Feature::Ttr => Some(self.ttr),
            Feature::HapaxRatio => Some(self.hapax_ratio),
        }
    }
}

/// Simpson estimator. The default samples pairs without replacement.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimpsonEstimator {
    #[default]
    Unbiased,
    /// Σ p², sampling with replacement.
    Biased,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureOptions {
    #[serde(default)]
    pub simpson: SimpsonEstimator,
}

// Type frequencies sorted ascending so float sums are order-stable.
fn type_counts(tokens: &TokenStream) -> Vec<usize> {
    let mut map: HashMap<&str, usize> = HashMap::new();
    for t in &tokens.tokens {
        *map.entry(t.as_str()).or_insert(0) += 1;
    }
    let mut counts: Vec<usize> = map.into_values().collect();
    counts.sort_unstable();
    counts
}

fn require(tokens: &TokenStream, min: usize, what: &str) -> Result<()> {
    if tokens.len() < min {
        return Err(Error::insufficient(format!(
            "{what} needs at least {min} tokens, `{}` has {}",
            tokens.source_id,
            tokens.len()
        )));
    }
    Ok(())
}

pub fn simpson_index(tokens: &TokenStream) -> Result<f64> {
    simpson_index_with(tokens, SimpsonEstimator::Unbiased)
}

/// Probability that two tokens drawn at random share a type.
pub fn simpson_index_with(tokens: &TokenStream, estimator: SimpsonEstimator) -> Result<f64> {
    require(tokens, 2, "simpson_index")?;
    Ok(simpson_from_counts(&type_counts(tokens), tokens.len(), estimator))
}

fn simpson_from_counts(counts: &[usize], len: usize, estimator: SimpsonEstimator) -> f64 {
    let n = len as f64;
    match estimator {
        SimpsonEstimator::Unbiased => {
            let same: f64 = counts.iter().map(|&c| (c * (c - 1)) as f64).sum();
            same / (n * (n - 1.0))
        }
        SimpsonEstimator::Biased => counts.iter().map(|&c| (c as f64 / n).powi(2)).sum(),
    }
}

/// Shannon entropy of the type distribution in bits.
pub fn shannon_entropy(tokens: &TokenStream) -> Result<f64> {
    require(tokens, 1, "shannon_entropy")?;
    Ok(shannon_from_counts(&type_counts(tokens), tokens.len()))
}

fn shannon_from_counts(counts: &[usize], len: usize) -> f64 {
    let n = len as f64;
    let h: f64 = counts
        .iter()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum();
    h.max(0.0)
}

/// Mean |head − dependent| over all non-root arcs; `None` without arcs.
pub fn avg_dependency_length(parses: &[SentenceParse]) -> Option<f64> {
    let mut total = 0usize;
    let mut arcs = 0usize;
    for s in parses {
        for (dep, head) in s.arcs() {
            total += dep.abs_diff(head);
            arcs += 1;
        }
    }
    (arcs > 0).then(|| total as f64 / arcs as f64)
}

pub fn type_token_ratio(tokens: &TokenStream) -> Result<f64> {
    require(tokens, 1, "type_token_ratio")?;
    Ok(type_counts(tokens).len() as f64 / tokens.len() as f64)
}

/// Number of types occurring exactly once.
pub fn hapax_count(tokens: &TokenStream) -> usize {
    type_counts(tokens).iter().filter(|&&c| c == 1).count()
}

/// Hapax legomena per token.
pub fn hapax_ratio(tokens: &TokenStream) -> Result<f64> {
    require(tokens, 1, "hapax_ratio")?;
    Ok(hapax_count(tokens) as f64 / tokens.len() as f64)
}

/// All five features for one document. `parses` may be absent, in which
/// case `dep_length` is `None`.
pub fn compute_features(
    tokens: &TokenStream,
    parses: Option<&[SentenceParse]>,
    options: FeatureOptions,
) -> Result<ComplexityVector> {
    require(tokens, 2, "compute_features")?;
    let counts = type_counts(tokens);
    let n = tokens.len();
    let hapax = counts.iter().take_while(|&&c| c == 1).count();
    Ok(ComplexityVector {
        source_id: tokens.source_id.clone(),
        simpson: simpson_from_counts(&counts, n, options.simpson),
        shannon: shannon_from_counts(&counts, n),
        dep_length: parses.and_then(avg_dependency_length),
        ttr: counts.len() as f64 / n as f64,
        hapax_ratio: hapax as f64 / n as f64,
        hapax_count: hapax,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub mean: f64,
    pub sd: f64,
    pub count: usize,
    /// Zero spread (or fewer than two values); excluded from z-scoring.
    pub constant: bool,
}

/// Per-feature location and scale fitted on a reference corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationStats {
    pub features: [FeatureStats; 5],
}

impl StandardizationStats {
    /// Mean 0, sd 1 on every feature: z-scores equal raw values.
    pub fn identity() -> Self {
        let s = FeatureStats {
            mean: 0.0,
            sd: 1.0,
            count: 0,
            constant: false,
        };
        StandardizationStats { features: [s; 5] }
    }

    pub fn get(&self, feature: Feature) -> &FeatureStats {
        &self.features[feature.index()]
    }

    pub fn is_usable(&self, feature: Feature) -> bool {
        !self.get(feature).constant
    }

    pub fn z(&self, feature: Feature, value: f64) -> Option<f64> {
        let s = self.get(feature);
        (!s.constant).then(|| (value - s.mean) / s.sd)
    }

    pub fn constant_features(&self) -> Vec<Feature> {
        Feature::ALL.into_iter().filter(|f| !self.is_usable(*f)).collect()
    }
}

/// Mean and sample sd (n − 1) of every feature over the present values.
pub fn fit_standardization(vectors: &[ComplexityVector]) -> Result<StandardizationStats> {
    if vectors.len() < 2 {
        return Err(Error::insufficient("fit_standardization needs at least two vectors"));
    }
    let features = Feature::ALL.map(|f| {
        let values: Vec<f64> = vectors.iter().filter_map(|v| v.get(f)).collect();
        let count = values.len();
        if count < 2 {
            return FeatureStats {
                mean: values.first().copied().unwrap_or(f64::NAN),
                sd: 0.0,
                count,
                constant: true,
            };
        }
        let mean = values.iter().sum::<f64>() / count as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
        let sd = var.sqrt();
        FeatureStats {
            mean,
            sd,
            count,
            constant: !(sd > 1e-12 * mean.abs().max(1.0)),
        }
    });
    Ok(StandardizationStats { features })
}

/// Mean z-score over the present, non-constant features.
pub fn composite_score(v: &ComplexityVector, stats: &StandardizationStats) -> Result<f64> {
    let zs: Vec<f64> = Feature::ALL
        .iter()
        .filter_map(|&f| v.get(f).and_then(|x| stats.z(f, x)))
        .collect();
    if zs.is_empty() {
        return Err(Error::insufficient(format!(
            "document `{}` has no usable feature for the composite",
            v.source_id
        )));
    }
    Ok(zs.iter().sum::<f64>() / zs.len() as f64)
}
