//! Levene, t-tests and Pearson correlation.

use serde::{Deserialize, Serialize};

use super::descriptive::{mean, median, variance};
use super::dist::{t_two_sided, Distribution};
use super::{EffectKind, Method, TestResult};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Center {
    /// Classic Levene.
    #[default]
    Mean,
    /// Brown–Forsythe variant.
    Median,
}

/// Levene's test for equality of variances across groups.
pub fn levene(groups: &[&[f64]], center: Center) -> Result<TestResult> {
    if groups.len() < 2 {
        return Err(Error::invalid("levene needs at least two groups"));
    }
    if let Some(i) = groups.iter().position(|g| g.len() < 2) {
        return Err(Error::insufficient(format!("levene group {i} has fewer than two values")));
    }
    let k = groups.len();
    let n_total: usize = groups.iter().map(|g| g.len()).sum();
    let deviations: Vec<Vec<f64>> = groups
        .iter()
        .map(|g| {
            let c = match center {
                Center::Mean => mean(g),
                Center::Median => median(g),
            };
            g.iter().map(|x| (x - c).abs()).collect()
        })
        .collect();
    let group_means: Vec<f64> = deviations.iter().map(|z| mean(z)).collect();
    let grand = deviations.iter().flatten().sum::<f64>() / n_total as f64;
    let between: f64 = deviations
        .iter()
        .zip(&group_means)
        .map(|(z, m)| z.len() as f64 * (m - grand).powi(2))
        .sum();
    let within: f64 = deviations
        .iter()
        .zip(&group_means)
        .map(|(z, m)| z.iter().map(|v| (v - m).powi(2)).sum::<f64>())
        .sum();
    let method = match center {
        Center::Mean => Method::LeveneMean,
        Center::Median => Method::BrownForsythe,
    };
    let n: Vec<usize> = groups.iter().map(|g| g.len()).collect();
    let df1 = (k - 1) as f64;
    let df2 = (n_total - k) as f64;
    let scale = grand.abs().max(1.0);
    if within <= f64::EPSILON * scale * scale * n_total as f64 {
        if between <= f64::EPSILON * scale * scale * n_total as f64 {
            return Ok(TestResult::new(method, 0.0, 1.0, n).with_df2(df1, df2));
        }
        return Err(Error::ZeroVariance(
            "levene: deviations are constant within every group".into(),
        ));
    }
    let w = (df2 / df1) * between / within;
    let p = Distribution::FisherF { df1, df2 }.sf(w);
    Ok(TestResult::new(method, w, p, n).with_df2(df1, df2))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TTestMode {
    Paired,
    #[default]
    Welch,
    Student,
}

/// Two-sided t-test with Cohen's d.
///
/// Paired d is mean(diff)/sd(diff); the two-sample modes report the
/// pooled-sd d regardless of whether the statistic itself is Welch's.
pub fn t_test(a: &[f64], b: &[f64], mode: TTestMode) -> Result<TestResult> {
    match mode {
        TTestMode::Paired => {
            if a.len() != b.len() {
                return Err(Error::invalid("paired t-test needs equal lengths"));
            }
            if a.len() < 2 {
                return Err(Error::insufficient("paired t-test needs at least two pairs"));
            }
            let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            let n = d.len() as f64;
            let md = mean(&d);
            let sd = variance(&d).sqrt();
            if !(sd > 0.0) {
                return Err(Error::ZeroVariance("paired differences have zero variance".into()));
            }
            let t = md / (sd / n.sqrt());
            let df = n - 1.0;
            Ok(TestResult::new(Method::PairedT, t, t_two_sided(t, df), vec![d.len()])
                .with_df(df)
                .with_effect(EffectKind::CohensD, md / sd))
        }
        TTestMode::Welch | TTestMode::Student => {
            if a.len() < 2 || b.len() < 2 {
                return Err(Error::insufficient("two-sample t-test needs at least two values per group"));
            }
            let (na, nb) = (a.len() as f64, b.len() as f64);
            let (ma, mb) = (mean(a), mean(b));
            let (va, vb) = (variance(a), variance(b));
            let pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0);
            if !(pooled > 0.0) {
                return Err(Error::ZeroVariance("both groups have zero variance".into()));
            }
            let d = (ma - mb) / pooled.sqrt();
            let (t, df, method) = if mode == TTestMode::Welch {
                let (sa, sb) = (va / na, vb / nb);
                let se2 = sa + sb;
                let df = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
                ((ma - mb) / se2.sqrt(), df, Method::WelchT)
            } else {
                let se = (pooled * (1.0 / na + 1.0 / nb)).sqrt();
                ((ma - mb) / se, na + nb - 2.0, Method::StudentT)
            };
            Ok(TestResult::new(method, t, t_two_sided(t, df), vec![a.len(), b.len()])
                .with_df(df)
                .with_effect(EffectKind::CohensD, d))
        }
    }
}

/// Pearson correlation with a t-distributed two-sided p (df = n − 2).
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<TestResult> {
    if x.len() != y.len() {
        return Err(Error::invalid("pearson_r needs equal lengths"));
    }
    if x.len() < 3 {
        return Err(Error::insufficient("pearson_r needs at least three pairs"));
    }
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if !(sxx > 0.0) || !(syy > 0.0) {
        return Err(Error::ZeroVariance("pearson_r: constant input".into()));
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let df = (x.len() - 2) as f64;
    let p = if r.abs() >= 1.0 {
        0.0
    } else {
        let t = r * (df / (1.0 - r * r)).sqrt();
        t_two_sided(t, df)
    };
    Ok(TestResult::new(Method::Pearson, r, p, vec![x.len()])
        .with_df(df)
        .with_effect(EffectKind::PearsonR, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levene_identical_groups() {
        let g = [1.0, 2.0, 4.0, 7.0];
        let r = levene(&[&g, &g], Center::Mean).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 1.0).abs() < 1e-12);
        assert_eq!((r.df, r.df2), (Some(1.0), Some(6.0)));
    }

    #[test]
    fn levene_all_zero_deviation() {
        let r = levene(&[&[3.0, 3.0], &[5.0, 5.0, 5.0]], Center::Median).unwrap();
        assert_eq!((r.statistic, r.p_value), (0.0, 1.0));
    }

    #[test]
    fn levene_requires_two_groups_of_two() {
        assert!(levene(&[&[1.0, 2.0, 3.0]], Center::Mean).is_err());
        assert!(levene(&[&[1.0, 2.0], &[1.0]], Center::Mean).is_err());
    }

    #[test]
    fn paired_zero_variance_is_an_error() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert!(matches!(t_test(&a, &a, TTestMode::Paired), Err(Error::ZeroVariance(_))));
        let b = [0.0, 1.0, 2.0, 3.0];
        assert!(matches!(t_test(&a, &b, TTestMode::Paired), Err(Error::ZeroVariance(_))));
    }

    #[test]
    fn student_t_hand_example() {
        // a = [1,2,3], b = [4,5,6]: pooled var 1, se = sqrt(2/3), t = -3/sqrt(2/3)
        let r = t_test(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], TTestMode::Student).unwrap();
        assert!((r.statistic + 3.0 / (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(r.df, Some(4.0));
        assert!((r.effect_size().unwrap() + 3.0).abs() < 1e-12);
        let w = t_test(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], TTestMode::Welch).unwrap();
        assert!((w.statistic - r.statistic).abs() < 1e-12);
        assert!((w.df.unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn pearson_perfect_lines() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 3.0).collect();
        let r = pearson_r(&x, &y).unwrap();
        assert!((r.statistic - 1.0).abs() < 1e-15);
        assert!(r.p_value < 1e-12);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson_r(&x, &neg).unwrap().statistic + 1.0).abs() < 1e-15);
        assert!(pearson_r(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    }
}
