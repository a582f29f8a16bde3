use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::corpus::TokenStream;
use crate::error::{Error, Result};

/// Sparse row with strictly increasing column indices.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SparseVector {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseVector {
    pub fn from_dense(v: &[f64]) -> Self {
        let (indices, values) = v.iter().enumerate().filter(|(_, x)| **x != 0.0).map(|(i, x)| (i, *x)).unzip();
        SparseVector { indices, values }
    }

    pub fn dot(&self, w: &[f64]) -> f64 {
        self.indices.iter().zip(&self.values).map(|(&i, v)| w[i] * v).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TfidfModel {
    pub vocabulary: BTreeMap<String, usize>,
    pub document_frequency: Vec<usize>,
    pub idf: Vec<f64>,
    pub n_docs: usize,
}

/// Fit vocabulary and smoothed idf = ln((1 + N)/(1 + df)) + 1.
pub fn tfidf_fit(docs: &[&TokenStream]) -> Result<TfidfModel> {
    if docs.is_empty() {
        return Err(Error::insufficient("tfidf_fit needs at least one document"));
    }
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for d in docs {
        let uniq: BTreeSet<&str> = d.tokens.iter().map(String::as_str).collect();
        for t in uniq {
            *df.entry(t).or_default() += 1;
        }
    }
    if df.is_empty() {
        return Err(Error::insufficient("tfidf_fit: empty vocabulary"));
    }
    let n = docs.len() as f64;
    let vocabulary = df.keys().enumerate().map(|(i, t)| (t.to_string(), i)).collect();
    let document_frequency: Vec<usize> = df.values().copied().collect();
    let idf = document_frequency
        .iter()
        .map(|&d| ((1.0 + n) / (1.0 + d as f64)).ln() + 1.0)
        .collect();
    Ok(TfidfModel {
        vocabulary,
        document_frequency,
        idf,
        n_docs: docs.len(),
    })
}

impl TfidfModel {
    pub fn dim(&self) -> usize {
        self.idf.len()
    }

    pub fn idf_of(&self, term: &str) -> Option<f64> {
        self.vocabulary.get(term).map(|&i| self.idf[i])
    }

    /// Raw-count tf × idf, L2-normalized. Streams with no known terms map
    /// to the zero vector; check [`SparseVector::is_zero`].
    pub fn transform(&self, doc: &TokenStream) -> SparseVector {
        let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
        for t in &doc.tokens {
            if let Some(&i) = self.vocabulary.get(t) {
                *counts.entry(i).or_default() += 1.0;
            }
        }
        let (indices, mut values): (Vec<usize>, Vec<f64>) =
            counts.into_iter().map(|(i, c)| (i, c * self.idf[i])).unzip();
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            values.iter_mut().for_each(|v| *v /= norm);
        }
        SparseVector { indices, values }
    }
}
