//! Category–trait association tests and rewrite shift analysis.

use serde::Serialize;

use super::ScoreTable;
use crate::error::{Error, Result};
use crate::stats::descriptive::{mean, variance, z_scores};
use crate::stats::{adjust_pvalues, levene, mann_whitney_u, pearson_r, t_test, Adjustment, Center, TTestMode};

const ALPHA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationRow {
    pub category: String,
    pub r: f64,
    pub p_raw: f64,
    pub p_adjusted: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationBattery {
    pub rows: Vec<CorrelationRow>,
    /// (category, reason) for categories left out of the family.
    pub skipped: Vec<(String, String)>,
    pub adjustment: Adjustment,
}

impl CorrelationBattery {
    pub fn row(&self, category: &str) -> Option<&CorrelationRow> {
        self.rows.iter().find(|r| r.category == category)
    }
}

/// Pearson r between each z-scored category and the z-scored trait, with
/// Bonferroni correction across the tested categories.
pub fn correlate_continuous(scores: &ScoreTable, trait_values: &[f64]) -> Result<CorrelationBattery> {
    correlate_continuous_with(scores, trait_values, Adjustment::Bonferroni)
}

pub fn correlate_continuous_with(scores: &ScoreTable, trait_values: &[f64], adjustment: Adjustment) -> Result<CorrelationBattery> {
    if scores.rows.len() != trait_values.len() {
        return Err(Error::invalid("trait values are not aligned with score rows"));
    }
    if trait_values.len() < 3 {
        return Err(Error::insufficient("correlation battery needs at least three authors"));
    }
    let tz = z_scores(trait_values).ok_or_else(|| Error::ZeroVariance("trait is constant".into()))?;
    let mut tested = Vec::new();
    let mut skipped = Vec::new();
    for (c, name) in scores.categories.iter().enumerate() {
        match scores.z_column(c) {
            Some(z) => {
                let res = pearson_r(&z, &tz)?;
                tested.push((name.clone(), res.statistic, res.p_value));
            }
            None => skipped.push((name.clone(), "constant category scores".to_string())),
        }
    }
    let raw: Vec<f64> = tested.iter().map(|t| t.2).collect();
    let adj = adjust_pvalues(&raw, adjustment)?;
    let rows = tested
        .into_iter()
        .zip(adj)
        .map(|((category, r, p_raw), p_adjusted)| CorrelationRow {
            category,
            r,
            p_raw,
            p_adjusted,
            significant: p_adjusted < ALPHA,
        })
        .collect();
    Ok(CorrelationBattery { rows, skipped, adjustment })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoricalRow {
    pub category: String,
    pub mean_a: f64,
    pub mean_b: f64,
    pub t: f64,
    pub df: f64,
    pub p_raw: f64,
    pub p_adjusted: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoricalBattery {
    /// Group names, sorted; `mean_a` belongs to the first.
    pub groups: [String; 2],
    pub rows: Vec<CategoricalRow>,
    pub skipped: Vec<(String, String)>,
    pub adjustment: Adjustment,
}

/// Two-group t tests of raw category ratios with Bonferroni correction.
pub fn compare_categorical(scores: &ScoreTable, groups: &[String]) -> Result<CategoricalBattery> {
    compare_categorical_with(scores, groups, TTestMode::Welch, Adjustment::Bonferroni)
}

pub fn compare_categorical_with(
    scores: &ScoreTable,
    groups: &[String],
    mode: TTestMode,
    adjustment: Adjustment,
) -> Result<CategoricalBattery> {
    if scores.rows.len() != groups.len() {
        return Err(Error::invalid("group labels are not aligned with score rows"));
    }
    if mode == TTestMode::Paired {
        return Err(Error::invalid("group comparisons need an independent-samples t test"));
    }
    let mut names: Vec<String> = groups.to_vec();
    names.sort();
    names.dedup();
    if names.len() != 2 {
        return Err(Error::invalid(format!(
            "compare_categorical needs exactly 2 groups, found {}; use kruskal_wallis for more",
            names.len()
        )));
    }
    let idx_a: Vec<usize> = (0..groups.len()).filter(|&i| groups[i] == names[0]).collect();
    let idx_b: Vec<usize> = (0..groups.len()).filter(|&i| groups[i] == names[1]).collect();
    if idx_a.len() < 2 || idx_b.len() < 2 {
        return Err(Error::insufficient("each group needs at least two authors"));
    }
    let mut tested = Vec::new();
    let mut skipped = Vec::new();
    for (c, name) in scores.categories.iter().enumerate() {
        let col = scores.column(c);
        let a: Vec<f64> = idx_a.iter().map(|&i| col[i]).collect();
        let b: Vec<f64> = idx_b.iter().map(|&i| col[i]).collect();
        match t_test(&a, &b, mode) {
            Ok(res) => tested.push((name.clone(), mean(&a), mean(&b), res)),
            Err(Error::ZeroVariance(m)) => skipped.push((name.clone(), m)),
            Err(e) => return Err(e),
        }
    }
    let raw: Vec<f64> = tested.iter().map(|t| t.3.p_value).collect();
    let adj = adjust_pvalues(&raw, adjustment)?;
    let rows = tested
        .into_iter()
        .zip(adj)
        .map(|((category, mean_a, mean_b, res), p_adjusted)| CategoricalRow {
            category,
            mean_a,
            mean_b,
            t: res.statistic,
            df: res.df.unwrap_or(f64::NAN),
            p_raw: res.p_value,
            p_adjusted,
            significant: p_adjusted < ALPHA,
        })
        .collect();
    Ok(CategoricalBattery {
        groups: [names[0].clone(), names[1].clone()],
        rows,
        skipped,
        adjustment,
    })
}

/// Min-max scale to [0, 1]; constant input maps to zeros and reports
/// `true`.
pub fn min_max_scale(xs: &[f64]) -> (Vec<f64>, bool) {
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if xs.is_empty() || !(hi > lo) {
        return (vec![0.0; xs.len()], true);
    }
    (xs.iter().map(|x| (x - lo) / (hi - lo)).collect(), false)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftRow {
    pub category: String,
    pub mean_original: f64,
    pub mean_rewrite: f64,
    pub var_original: f64,
    pub var_rewrite: f64,
    pub mw_u: Option<f64>,
    pub mw_p: f64,
    pub mw_p_adjusted: f64,
    pub distribution_shift: bool,
    pub levene_w: Option<f64>,
    pub levene_p: Option<f64>,
    /// "↓" when rewrites vary significantly less, "↑" when more.
    pub direction: Option<&'static str>,
    /// Fraction of rewrites with a nonzero ratio.
    pub rewrite_presence: f64,
    pub retention_flag: bool,
    pub constant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftReport {
    pub rows: Vec<ShiftRow>,
    pub adjustment: Adjustment,
}

/// Compare original and rewritten category distributions after min-max
/// scaling over the pooled values. Mann–Whitney p values are BH-adjusted
/// across categories; Levene's test (mean-centered) gives the variance
/// direction.
pub fn lexical_shift_report(orig: &ScoreTable, rewritten: &ScoreTable) -> Result<ShiftReport> {
    for c in &orig.categories {
        if rewritten.index_of(c).is_none() {
            return Err(Error::invalid(format!("category `{c}` is absent from the rewritten scores")));
        }
    }
    if let Some(c) = rewritten.categories.iter().find(|c| orig.index_of(c).is_none()) {
        return Err(Error::invalid(format!("category `{c}` is absent from the original scores")));
    }
    if orig.rows.len() < 2 || rewritten.rows.len() < 2 {
        return Err(Error::insufficient("shift report needs at least two documents per corpus"));
    }
    let no = orig.rows.len();
    let mut rows = Vec::new();
    for (c, name) in orig.categories.iter().enumerate() {
        let a = orig.column(c);
        let b = rewritten.column(rewritten.index_of(name).expect("checked"));
        let pooled: Vec<f64> = a.iter().chain(&b).copied().collect();
        let (scaled, constant) = min_max_scale(&pooled);
        let (sa, sb) = scaled.split_at(no);
        let presence = b.iter().filter(|&&v| v > 0.0).count() as f64 / b.len() as f64;
        let (mw_u, mw_p) = if constant {
            (None, 1.0)
        } else {
            let r = mann_whitney_u(sa, sb)?;
            (Some(r.statistic), r.p_value)
        };
        let (levene_w, levene_p) = match levene(&[sa, sb], Center::Mean) {
            Ok(r) => (Some(r.statistic), Some(r.p_value)),
            Err(Error::ZeroVariance(_)) => (None, None),
            Err(e) => return Err(e),
        };
        let (va, vb) = (variance(sa), variance(sb));
        let direction = match levene_p {
            Some(p) if p < ALPHA => Some(if vb < va { "↓" } else { "↑" }),
            _ => None,
        };
        rows.push(ShiftRow {
            category: name.clone(),
            mean_original: mean(sa),
            mean_rewrite: mean(sb),
            var_original: va,
            var_rewrite: vb,
            mw_u,
            mw_p,
            mw_p_adjusted: f64::NAN,
            distribution_shift: false,
            levene_w,
            levene_p,
            direction,
            rewrite_presence: presence,
            retention_flag: presence <= 0.10,
            constant,
        });
    }
    let raw: Vec<f64> = rows.iter().map(|r| r.mw_p).collect();
    let adj = adjust_pvalues(&raw, Adjustment::BenjaminiHochberg)?;
    for (r, p) in rows.iter_mut().zip(adj) {
        r.mw_p_adjusted = p;
        r.distribution_shift = p < ALPHA;
    }
    Ok(ShiftReport {
        rows,
        adjustment: Adjustment::BenjaminiHochberg,
    })
}

#[cfg(test)]
mod tests {
    use super::super::CategoryScores;
    use super::*;

    fn table(cols: Vec<Vec<f64>>) -> ScoreTable {
        let n = cols[0].len();
        ScoreTable {
            categories: (0..cols.len()).map(|c| format!("c{c}")).collect(),
            rows: (0..n)
                .map(|i| CategoryScores {
                    document_id: format!("d{i}"),
                    ratios: cols.iter().map(|c| c[i]).collect(),
                })
                .collect(),
        }
    }

    #[test]
    fn perfect_correlation_survives_bonferroni() {
        let trait_v: Vec<f64> = (0..30).map(|i| ((i * 7) % 13) as f64).collect();
        let z = z_scores(&trait_v).unwrap();
        let noise: Vec<f64> = (0..30).map(|i| ((i * 5) % 11) as f64 / 100.0).collect();
        let t = table(vec![z.clone(), noise, vec![0.1; 30]]);
        let b = correlate_continuous(&t, &trait_v).unwrap();
        let row = b.row("c0").unwrap();
        assert!((row.r - 1.0).abs() < 1e-9 && row.significant);
        assert_eq!(b.skipped.len(), 1);
        for r in &b.rows {
            assert!(r.p_adjusted >= r.p_raw);
        }
    }

    #[test]
    fn categorical_groups() {
        let t = table(vec![vec![0.1, 0.12, 0.02, 0.03, 0.11, 0.01]]);
        let g: Vec<String> = ["a", "a", "b", "b", "a", "b"].iter().map(|s| s.to_string()).collect();
        let b = compare_categorical(&t, &g).unwrap();
        assert!(b.rows[0].mean_a > b.rows[0].mean_b);
        let three: Vec<String> = ["a", "b", "c", "a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let e = compare_categorical(&t, &three).unwrap_err();
        assert!(e.to_string().contains("kruskal_wallis"));
    }

    #[test]
    fn min_max() {
        assert_eq!(min_max_scale(&[1.0, 3.0, 5.0]), (vec![0.0, 0.5, 1.0], false));
        assert_eq!(min_max_scale(&[2.0, 2.0]), (vec![0.0, 0.0], true));
    }

    #[test]
    fn shift_cases() {
        let a: Vec<f64> = (0..40).map(|i| 0.01 + (i % 7) as f64 * 0.01).collect();
        let orig = table(vec![a.clone()]);
        let same = lexical_shift_report(&orig, &orig).unwrap();
        assert!(!same.rows[0].distribution_shift && same.rows[0].direction.is_none());
        let zeroed = table(vec![vec![0.0; 40]]);
        let rep = lexical_shift_report(&orig, &zeroed).unwrap();
        assert!(rep.rows[0].retention_flag);
        assert!(rep.rows[0].distribution_shift);
    }
}
