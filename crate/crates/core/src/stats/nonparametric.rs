//! Rank-based tests: Wilcoxon signed-rank, Mann–Whitney U, Kruskal–Wallis
//! and Dunn's pairwise post-hoc.
//!
//! Normal approximations are tie-corrected. Wilcoxon and Mann–Whitney apply
//! a 0.5 continuity correction toward the null mean.

use serde::Serialize;

use super::descriptive::rank_average;
use super::dist::{z_two_sided, Distribution};
use super::multiple::{adjust_pvalues, Adjustment};
use super::{EffectKind, Method, TestResult};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum WilcoxonMethod {
    /// Exact null distribution when at most 10 nonzero differences and no
    /// tied magnitudes, normal approximation otherwise.
    #[default]
    Auto,
    Exact,
    Approx,
}

const EXACT_MAX_N: usize = 10;

/// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences
/// are dropped; the statistic is the smaller of the signed rank sums.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<TestResult> {
    wilcoxon_signed_rank_with(a, b, WilcoxonMethod::Auto)
}

pub fn wilcoxon_signed_rank_with(a: &[f64], b: &[f64], method: WilcoxonMethod) -> Result<TestResult> {
    if a.len() != b.len() {
        return Err(Error::invalid("wilcoxon needs equal-length samples"));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|v| *v != 0.0).collect();
    if d.is_empty() {
        return Err(Error::ZeroVariance("wilcoxon: all differences are zero".into()));
    }
    let n = d.len();
    let abs: Vec<f64> = d.iter().map(|v| v.abs()).collect();
    let ranking = rank_average(&abs);
    let r_plus: f64 = d.iter().zip(&ranking.ranks).filter(|(v, _)| **v > 0.0).fold(0.0, |s, (_, r)| s + r);
    let r_minus: f64 = d.iter().zip(&ranking.ranks).filter(|(v, _)| **v < 0.0).fold(0.0, |s, (_, r)| s + r);
    let t = r_plus.min(r_minus);

    let exact = match method {
        WilcoxonMethod::Exact => {
            if !ranking.ties.is_empty() {
                return Err(Error::invalid("exact wilcoxon requires untied magnitudes"));
            }
            true
        }
        WilcoxonMethod::Approx => false,
        WilcoxonMethod::Auto => n <= EXACT_MAX_N && ranking.ties.is_empty(),
    };

    if exact {
        let p = exact_signed_rank_p(n, r_plus.round() as usize);
        return Ok(TestResult::new(Method::WilcoxonSignedRankExact, t, p, vec![n]));
    }

    let nf = n as f64;
    let mn = nf * (nf + 1.0) / 4.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - ranking.tie_term() / 48.0;
    let z = if var > 0.0 {
        let diff = t - mn;
        (diff - 0.5 * diff.signum()) / var.sqrt()
    } else {
        0.0
    };
    Ok(TestResult::new(Method::WilcoxonSignedRank, t, z_two_sided(z), vec![n]))
}

/// Null distribution counts of W+ for n untied ranks.
fn signed_rank_counts(n: usize) -> Vec<f64> {
    let max = n * (n + 1) / 2;
    let mut counts = vec![0.0f64; max + 1];
    counts[0] = 1.0;
    for k in 1..=n {
        for s in (k..=max).rev() {
            counts[s] += counts[s - k];
        }
    }
    counts
}

fn exact_signed_rank_p(n: usize, r_plus: usize) -> f64 {
    let counts = signed_rank_counts(n);
    let total: f64 = counts.iter().sum();
    let max = counts.len() - 1;
    if 2 * r_plus == max {
        return 1.0;
    }
    let lower: f64 = counts[..=r_plus].iter().sum::<f64>() / total;
    let upper: f64 = counts[r_plus..].iter().sum::<f64>() / total;
    (2.0 * lower.min(upper)).min(1.0)
}

/// Mann–Whitney U for two independent samples.
///
/// The statistic is U for the first sample, so `a` entirely above `b`
/// gives U = n_a·n_b. Rank-biserial r = 2U/(n_a·n_b) − 1 is positive when
/// `a` tends to exceed `b`.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<TestResult> {
    let (u1, z) = mann_whitney_parts(a, b, true)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let p = match z {
        Some(z) => Distribution::STANDARD_NORMAL.sf(z) * 2.0,
        None => 1.0,
    };
    Ok(TestResult::new(Method::MannWhitneyU, u1, p, vec![a.len(), b.len()])
        .with_effect(EffectKind::RankBiserial, 2.0 * u1 / (na * nb) - 1.0))
}

/// Signed standardized U for `a` (no continuity correction when
/// `continuity` is false). `None` when every value is tied.
pub fn mann_whitney_z(a: &[f64], b: &[f64], continuity: bool) -> Result<Option<f64>> {
    let (u1, _) = mann_whitney_parts(a, b, false)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let sd = mann_whitney_sd(a, b);
    if !(sd > 0.0) {
        return Ok(None);
    }
    let mut num = u1 - na * nb / 2.0;
    if continuity {
        num -= 0.5 * num.signum();
    }
    Ok(Some(num / sd))
}

fn mann_whitney_sd(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranking = rank_average(&pooled);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let n = na + nb;
    let var = na * nb / 12.0 * ((n + 1.0) - ranking.tie_term() / (n * (n - 1.0)));
    var.max(0.0).sqrt()
}

// Returns U for `a` and the one-sided z of max(U1, U2) with continuity.
fn mann_whitney_parts(a: &[f64], b: &[f64], continuity: bool) -> Result<(f64, Option<f64>)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::insufficient("mann_whitney_u needs nonempty groups"));
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranking = rank_average(&pooled);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let r1: f64 = ranking.ranks[..a.len()].iter().sum();
    let u1 = r1 - na * (na + 1.0) / 2.0;
    let u2 = na * nb - u1;
    let sd = mann_whitney_sd(a, b);
    if !(sd > 0.0) {
        return Ok((u1, None));
    }
    let mut num = u1.max(u2) - na * nb / 2.0;
    if continuity {
        num -= 0.5;
    }
    Ok((u1, Some(num / sd)))
}

/// Kruskal–Wallis H with tie correction. Effects: ε² = H/(N − 1) first,
/// then η²_H = (H − k + 1)/(N − k).
pub fn kruskal_wallis(groups: &[&[f64]]) -> Result<TestResult> {
    if groups.len() < 2 {
        return Err(Error::invalid("kruskal_wallis needs at least two groups"));
    }
    if groups.iter().any(|g| g.is_empty()) {
        return Err(Error::insufficient("kruskal_wallis: empty group"));
    }
    let n_total: usize = groups.iter().map(|g| g.len()).sum();
    if n_total < 5 {
        return Err(Error::insufficient("kruskal_wallis needs at least five observations"));
    }
    let pooled: Vec<f64> = groups.iter().flat_map(|g| g.iter().copied()).collect();
    let ranking = rank_average(&pooled);
    let nf = n_total as f64;
    let correction = 1.0 - ranking.tie_term() / (nf.powi(3) - nf);
    if !(correction > 0.0) {
        return Err(Error::ZeroVariance("kruskal_wallis: all values identical".into()));
    }
    let mut offset = 0;
    let mut sum = 0.0;
    for g in groups {
        let r: f64 = ranking.ranks[offset..offset + g.len()].iter().sum();
        sum += r * r / g.len() as f64;
        offset += g.len();
    }
    let h = (12.0 / (nf * (nf + 1.0)) * sum - 3.0 * (nf + 1.0)) / correction;
    let k = groups.len() as f64;
    let p = Distribution::ChiSquare { df: k - 1.0 }.sf(h);
    Ok(TestResult::new(Method::KruskalWallis, h, p, groups.iter().map(|g| g.len()).collect())
        .with_df(k - 1.0)
        .with_effect(EffectKind::EpsilonSquared, h / (nf - 1.0))
        .with_effect(EffectKind::EtaSquaredH, (h - k + 1.0) / (nf - k)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairwiseResult {
    pub group_a: usize,
    pub group_b: usize,
    /// z statistic and adjusted p.
    pub result: TestResult,
    pub p_raw: f64,
}

/// Dunn's pairwise z tests on pooled, tie-corrected ranks.
pub fn dunn_posthoc(groups: &[&[f64]], adjust: Adjustment) -> Result<Vec<PairwiseResult>> {
    if groups.len() < 2 {
        return Err(Error::invalid("dunn_posthoc needs at least two groups"));
    }
    if groups.iter().any(|g| g.is_empty()) {
        return Err(Error::insufficient("dunn_posthoc: empty group"));
    }
    let pooled: Vec<f64> = groups.iter().flat_map(|g| g.iter().copied()).collect();
    let ranking = rank_average(&pooled);
    let nf = pooled.len() as f64;
    let base_var = nf * (nf + 1.0) / 12.0 - ranking.tie_term() / (12.0 * (nf - 1.0));
    let mut mean_ranks = Vec::with_capacity(groups.len());
    let mut offset = 0;
    for g in groups {
        let r: f64 = ranking.ranks[offset..offset + g.len()].iter().sum();
        mean_ranks.push(r / g.len() as f64);
        offset += g.len();
    }
    let mut pairs = Vec::new();
    let mut zs = Vec::new();
    for i in 0..groups.len() {
        for j in i + 1..groups.len() {
            let se = (base_var * (1.0 / groups[i].len() as f64 + 1.0 / groups[j].len() as f64)).sqrt();
            let z = if se > 0.0 { (mean_ranks[i] - mean_ranks[j]) / se } else { 0.0 };
            pairs.push((i, j));
            zs.push(z);
        }
    }
    let raw: Vec<f64> = zs.iter().map(|&z| z_two_sided(z)).collect();
    let adjusted = match adjust {
        Adjustment::None => raw.clone(),
        other => adjust_pvalues(&raw, other)?,
    };
    Ok(pairs
        .into_iter()
        .zip(zs)
        .zip(raw.into_iter().zip(adjusted))
        .map(|(((i, j), z), (p_raw, p_adj))| PairwiseResult {
            group_a: i,
            group_b: j,
            result: TestResult::new(Method::Dunn, z, p_adj, vec![groups[i].len(), groups[j].len()]),
            p_raw,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilcoxon_all_zero_is_error() {
        let a = [1.0, 2.0, 3.0];
        assert!(wilcoxon_signed_rank(&a, &a).is_err());
    }

    #[test]
    fn wilcoxon_exact_all_positive() {
        // 2^3 sign assignments; W+ = 6 only for all-positive, so one tail is 1/8.
        let r = wilcoxon_signed_rank(&[1.0, 2.0, 3.0], &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(r.statistic.is_sign_positive());
        assert!((r.p_value - 0.25).abs() < 1e-15);
        assert_eq!(r.method, Method::WilcoxonSignedRankExact);
    }

    #[test]
    fn exact_distribution_sums_to_two_pow_n() {
        for n in 1..12 {
            let c = signed_rank_counts(n);
            assert_eq!(c.iter().sum::<f64>(), 2f64.powi(n as i32));
        }
    }

    #[test]
    fn mann_whitney_conventions() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let r = mann_whitney_u(&a, &a).unwrap();
        assert_eq!(r.statistic, 8.0);
        assert!((r.p_value - 1.0).abs() < 1e-12);
        let hi = [10.0, 11.0, 12.0];
        let r = mann_whitney_u(&hi, &a).unwrap();
        assert_eq!(r.statistic, 12.0);
        assert_eq!(r.effect_size(), Some(1.0));
        assert!(mann_whitney_u(&[], &a).is_err());
    }

    #[test]
    fn kruskal_two_groups_is_squared_z() {
        let a = [1.2, 3.4, 2.2, 5.0, 0.3, 4.4];
        let b = [2.5, 6.1, 7.7, 3.4, 8.0];
        let h = kruskal_wallis(&[&a, &b]).unwrap().statistic;
        let z = mann_whitney_z(&a, &b, false).unwrap().unwrap();
        assert!((h - z * z).abs() < 1e-8, "{h} vs {}", z * z);
    }

    #[test]
    fn kruskal_rejects_identical_values() {
        let g = [2.0, 2.0, 2.0];
        assert!(matches!(kruskal_wallis(&[&g, &g]), Err(Error::ZeroVariance(_))));
    }

    #[test]
    fn dunn_identical_groups() {
        let g = [1.0, 2.0, 3.0, 4.0];
        let res = dunn_posthoc(&[&g, &g, &g], Adjustment::BenjaminiHochberg).unwrap();
        assert_eq!(res.len(), 3);
        for r in res {
            assert_eq!(r.result.statistic, 0.0);
            assert!((r.result.p_value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dunn_unadjusted_is_raw_normal_p() {
        let a = [1.0, 2.0, 3.0];
        let b = [4.0, 5.0, 6.0];
        let c = [2.5, 7.0, 8.0];
        for r in dunn_posthoc(&[&a, &b, &c], Adjustment::None).unwrap() {
            assert_eq!(r.result.p_value, r.p_raw);
            assert!((r.p_raw - z_two_sided(r.result.statistic)).abs() < 1e-15);
        }
        assert!(dunn_posthoc(&[&a, &[], &c], Adjustment::None).is_err());
    }
}
