//! Monthly variance series and the econometric tests run on them.

mod adf;
mod dgm;
mod granger;
mod reliability;

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::Serialize;

pub use adf::{adf_test, adf_test_with, mackinnon_p, AdfOptions, AdfResult};
pub use dgm::{fit_dgm, fit_dgm_values, DgmOptions, DgmResult, DgmTerm, RhoSearch};
pub use granger::{granger_pipeline, granger_test, GrangerLag, GrangerPipeline, GrangerResult, MAX_GRANGER_LAG};
pub use reliability::{cronbach_alpha, feldt_interval, ReliabilityResult};

use crate::complexity::{ComplexityVector, Feature, StandardizationStats};
use crate::corpus::{Document, Month};
use crate::error::{Error, Result};

/// Variance of each z-scored feature within one calendar month.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonthVariance {
    pub month: Month,
    pub doc_count: usize,
    /// Indexed like [`Feature::ALL`]; `None` when the feature is excluded
    /// or has fewer than two values this month.
    pub features: [Option<f64>; 5],
    /// Mean of the present per-feature variances.
    pub composite: Option<f64>,
}

impl MonthVariance {
    pub fn feature(&self, f: Feature) -> Option<f64> {
        self.features[f as usize]
    }

    pub fn is_missing(&self) -> bool {
        self.composite.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceSeries {
    /// Every calendar month between the first and last document.
    pub rows: Vec<MonthVariance>,
    /// Features that entered the composite (non-constant in the stats).
    pub included: Vec<Feature>,
    pub min_docs: usize,
}

impl VarianceSeries {
    /// Non-missing (month, composite) observations in order.
    pub fn composite_observations(&self) -> Vec<(Month, f64)> {
        self.rows.iter().filter_map(|r| r.composite.map(|c| (r.month, c))).collect()
    }

    pub fn observed_months(&self) -> usize {
        self.rows.iter().filter(|r| !r.is_missing()).count()
    }

    /// months × included-features matrix over months where every included
    /// feature is present, for reliability analysis.
    pub fn item_matrix(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .filter_map(|r| self.included.iter().map(|&f| r.feature(f)).collect::<Option<Vec<f64>>>())
            .collect()
    }
}

fn sample_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)
}

/// Monthly sample variances (n − 1) of z-scored features.
///
/// Months with fewer than `min_docs` documents carry no values.
pub fn monthly_variance(
    features: &[(NaiveDate, ComplexityVector)],
    stats: &StandardizationStats,
    min_docs: usize,
) -> Result<VarianceSeries> {
    if min_docs < 2 {
        return Err(Error::invalid("min_docs must be at least 2"));
    }
    let mut by_month: BTreeMap<Month, Vec<&ComplexityVector>> = BTreeMap::new();
    for (date, v) in features {
        by_month.entry(Month::from_date(*date)).or_default().push(v);
    }
    let (Some(&first), Some(&last)) = (by_month.keys().next(), by_month.keys().next_back()) else {
        return Err(Error::insufficient("no dated feature vectors"));
    };
    let included: Vec<Feature> = Feature::ALL.into_iter().filter(|&f| stats.is_usable(f)).collect();
    let mut rows = Vec::new();
    for month in Month::range(first, last) {
        let docs = by_month.get(&month).map(Vec::as_slice).unwrap_or(&[]);
        let mut row = MonthVariance {
            month,
            doc_count: docs.len(),
            features: [None; 5],
            composite: None,
        };
        if docs.len() >= min_docs {
            for &f in &included {
                let zs: Vec<f64> = docs.iter().filter_map(|v| v.get(f).and_then(|x| stats.z(f, x))).collect();
                if zs.len() >= 2 {
                    row.features[f as usize] = Some(sample_variance(&zs));
                }
            }
            let present: Vec<f64> = row.features.iter().flatten().copied().collect();
            if !present.is_empty() {
                row.composite = Some(present.iter().sum::<f64>() / present.len() as f64);
            }
        }
        rows.push(row);
    }
    if rows.iter().all(MonthVariance::is_missing) {
        return Err(Error::insufficient(format!("every month has fewer than {min_docs} documents")));
    }
    Ok(VarianceSeries { rows, included, min_docs })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonthRate {
    pub month: Month,
    pub scored: usize,
    /// Fraction with detector_score ≥ threshold; `None` without scored docs.
    pub rate: Option<f64>,
}

/// Monthly share of documents the detector attributes to AI.
pub fn monthly_ai_rate(docs: &[Document], threshold: f64) -> Result<Vec<MonthRate>> {
    let mut by_month: BTreeMap<Month, (usize, usize)> = BTreeMap::new();
    let mut any = false;
    for d in docs {
        let entry = by_month.entry(d.month()).or_insert((0, 0));
        if let Some(s) = d.detector_score {
            any = true;
            entry.0 += 1;
            if s >= threshold {
                entry.1 += 1;
            }
        }
    }
    if !any {
        return Err(Error::insufficient("no document carries a detector_score"));
    }
    let first = *by_month.keys().next().expect("nonempty");
    let last = *by_month.keys().next_back().expect("nonempty");
    Ok(Month::range(first, last)
        .map(|month| {
            let (scored, ai) = by_month.get(&month).copied().unwrap_or((0, 0));
            MonthRate {
                month,
                scored,
                rate: (scored > 0).then(|| ai as f64 / scored as f64),
            }
        })
        .collect())
}

/// Apply first differences `order` times.
pub fn difference(series: &[f64], order: usize) -> Result<Vec<f64>> {
    if order == 0 {
        return Err(Error::invalid("differencing order must be at least 1"));
    }
    if series.len() <= order {
        return Err(Error::insufficient(format!(
            "series of length {} cannot be differenced {order} times",
            series.len()
        )));
    }
    let mut out = series.to_vec();
    for _ in 0..order {
        out = out.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cv(v: f64) -> ComplexityVector {
        ComplexityVector {
            source_id: "x".into(),
            simpson: v,
            shannon: v,
            dep_length: Some(v),
            ttr: v,
            hapax_ratio: v,
            hapax_count: 0,
        }
    }

    fn day(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    #[test]
    fn composite_variance_two_docs() {
        let rows = vec![(day(2022, 1, 3), cv(0.0)), (day(2022, 1, 20), cv(2.0))];
        let s = monthly_variance(&rows, &StandardizationStats::identity(), 2).unwrap();
        assert_eq!(s.rows.len(), 1);
        assert_eq!(s.rows[0].composite, Some(2.0));
    }

    #[test]
    fn identical_docs_zero_variance_and_sparse_months_missing() {
        let rows = vec![
            (day(2022, 1, 3), cv(1.0)),
            (day(2022, 1, 4), cv(1.0)),
            (day(2022, 3, 9), cv(5.0)),
        ];
        let s = monthly_variance(&rows, &StandardizationStats::identity(), 2).unwrap();
        assert_eq!(s.rows.len(), 3);
        assert!(s.rows[0].features.iter().all(|v| *v == Some(0.0)));
        assert!(s.rows[1].is_missing() && s.rows[1].doc_count == 0);
        assert!(s.rows[2].is_missing() && s.rows[2].doc_count == 1);
        let lone = vec![(day(2022, 1, 3), cv(1.0))];
        assert!(monthly_variance(&lone, &StandardizationStats::identity(), 2).is_err());
    }

    #[test]
    fn composite_is_mean_of_stored_features() {
        let rows: Vec<_> = (0..30)
            .map(|i| {
                let mut v = cv((i * 7 % 11) as f64);
                v.ttr = (i * 3 % 5) as f64;
                v.dep_length = (i % 4 != 0).then_some(i as f64);
                (day(2021, 1 + (i % 3) as u32, 1 + i as u32 % 27), v)
            })
            .collect();
        let s = monthly_variance(&rows, &StandardizationStats::identity(), 2).unwrap();
        for r in &s.rows {
            let present: Vec<f64> = r.features.iter().flatten().copied().collect();
            let mean = present.iter().sum::<f64>() / present.len() as f64;
            assert!((r.composite.unwrap() - mean).abs() < 1e-12);
        }
    }

    #[test]
    fn ai_rate_fractions() {
        let mut docs = Vec::new();
        for (i, s) in [0.9, 0.8, 0.7, 0.1].iter().enumerate() {
            let mut d = Document::new(format!("a{i}"), "t", day(2023, 1, 2));
            d.detector_score = Some(*s);
            docs.push(d);
        }
        for i in 0..2 {
            let mut d = Document::new(format!("b{i}"), "t", day(2023, 2, 2));
            d.detector_score = Some(0.95);
            docs.push(d);
        }
        docs.push(Document::new("c", "t", day(2023, 3, 2)));
        let mut low = Document::new("d", "t", day(2023, 4, 2));
        low.detector_score = Some(0.01);
        docs.push(low);
        let rates = monthly_ai_rate(&docs, 0.5).unwrap();
        let r: Vec<Option<f64>> = rates.iter().map(|m| m.rate).collect();
        assert_eq!(r, vec![Some(0.75), Some(1.0), None, Some(0.0)]);
        assert!(monthly_ai_rate(&[Document::new("z", "t", day(2023, 1, 1))], 0.5).is_err());
    }

    #[test]
    fn differencing() {
        assert_eq!(difference(&[1.0, 3.0, 6.0], 1).unwrap(), vec![2.0, 3.0]);
        let ramp: Vec<f64> = (0..10).map(|i| 0.5 + 2.0 * i as f64).collect();
        let d = difference(&ramp, 1).unwrap();
        assert!(d.iter().all(|v| *v == 2.0));
        assert!(difference(&[1.0, 2.0], 2).is_err());
    }
}
