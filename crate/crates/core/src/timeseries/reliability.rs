use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::Distribution;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReliabilityResult {
    pub alpha: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_rows: usize,
    pub n_items: usize,
}

/// Cronbach's alpha over a rows × items matrix with Feldt's 95% interval.
pub fn cronbach_alpha(rows: &[Vec<f64>]) -> Result<ReliabilityResult> {
    let n = rows.len();
    if n < 3 {
        return Err(Error::insufficient("cronbach_alpha needs at least three rows"));
    }
    let k = rows[0].len();
    if k < 2 || rows.iter().any(|r| r.len() != k) {
        return Err(Error::invalid("cronbach_alpha needs a rectangular matrix with at least two items"));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::invalid("cronbach_alpha: missing or non-finite cell"));
    }
    let var = |xs: &[f64]| {
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
    };
    let item_var: f64 = (0..k)
        .map(|j| var(&rows.iter().map(|r| r[j]).collect::<Vec<_>>()))
        .sum();
    let totals: Vec<f64> = rows.iter().map(|r| r.iter().sum()).collect();
    let total_var = var(&totals);
    if !(total_var > 0.0) {
        return Err(Error::ZeroVariance("cronbach_alpha: total score variance is zero".into()));
    }
    let kf = k as f64;
    let alpha = kf / (kf - 1.0) * (1.0 - item_var / total_var);
    let (ci_low, ci_high) = feldt_interval(alpha, n, k);
    Ok(ReliabilityResult {
        alpha,
        ci_low,
        ci_high,
        n_rows: n,
        n_items: k,
    })
}

/// Feldt's F-based 95% interval for alpha with `n` rows and `k` items.
pub fn feldt_interval(alpha: f64, n: usize, k: usize) -> (f64, f64) {
    let df1 = (n - 1) as f64;
    let df2 = ((n - 1) * (k - 1)) as f64;
    let f = Distribution::FisherF { df1, df2 };
    (1.0 - (1.0 - alpha) * f.quantile(0.975), 1.0 - (1.0 - alpha) * f.quantile(0.025))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_columns_give_one() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64 * 0.3; 4]).collect();
        let r = cronbach_alpha(&rows).unwrap();
        assert!((r.alpha - 1.0).abs() < 1e-12);
        assert!((r.ci_low - 1.0).abs() < 1e-12 && (r.ci_high - 1.0).abs() < 1e-12);
    }

    #[test]
    fn feldt_reproduces_reported_interval() {
        // α = .722 over 70 monthly rows of five features → [.604, .813]
        let (lo, hi) = feldt_interval(0.722, 70, 5);
        assert_eq!(((lo * 1000.0).round(), (hi * 1000.0).round()), (604.0, 813.0));
    }

    #[test]
    fn zero_total_variance() {
        let rows = vec![vec![1.0, 2.0]; 5];
        assert!(matches!(cronbach_alpha(&rows), Err(Error::ZeroVariance(_))));
        assert!(cronbach_alpha(&rows[..2]).is_err());
    }
}
