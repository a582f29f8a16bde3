//! Gwet's AC1 chance-corrected agreement for several raters.

use serde::Serialize;

use super::dist::Distribution;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementResult {
    pub ac1: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub percent_agreement: f64,
    pub chance_agreement: f64,
    pub n_items: usize,
    pub n_raters: usize,
}

/// AC1 over an items × raters matrix. Ratings are category labels in
/// `1..=categories`. The 95% interval comes from Gwet's linearized variance
/// estimator with a normal quantile, clamped to [−1, 1].
pub fn gwet_ac1(ratings: &[Vec<u32>], categories: u32) -> Result<AgreementResult> {
    if categories < 2 {
        return Err(Error::invalid("gwet_ac1 needs at least two declared categories"));
    }
    let n = ratings.len();
    if n < 2 {
        return Err(Error::insufficient("gwet_ac1 needs at least two items"));
    }
    let raters = ratings[0].len();
    if raters < 2 || ratings.iter().any(|r| r.len() != raters) {
        return Err(Error::invalid("gwet_ac1 needs a rectangular matrix with at least two raters"));
    }
    let q = categories as usize;
    let mut counts = vec![vec![0.0f64; q]; n];
    for (i, row) in ratings.iter().enumerate() {
        for &c in row {
            if c < 1 || c > categories {
                return Err(Error::invalid(format!("rating {c} outside 1..={categories}")));
            }
            counts[i][(c - 1) as usize] += 1.0;
        }
    }
    let r = raters as f64;
    let nf = n as f64;
    let qf = q as f64;

    let pa_item: Vec<f64> = counts
        .iter()
        .map(|row| row.iter().map(|c| c * (c - 1.0)).sum::<f64>() / (r * (r - 1.0)))
        .collect();
    let pa = pa_item.iter().sum::<f64>() / nf;
    let pi: Vec<f64> = (0..q)
        .map(|k| counts.iter().map(|row| row[k] / r).sum::<f64>() / nf)
        .collect();
    let pe = pi.iter().map(|p| p * (1.0 - p)).sum::<f64>() / (qf - 1.0);
    let ac1 = (pa - pe) / (1.0 - pe);

    let mut ss = 0.0;
    for (row, pa_i) in counts.iter().zip(&pa_item) {
        let ac1_i = (pa_i - pe) / (1.0 - pe);
        let pe_i = row.iter().zip(&pi).map(|(c, p)| c * (1.0 - p)).sum::<f64>() / (r * (qf - 1.0));
        let lin = ac1_i - 2.0 * (1.0 - ac1) * (pe_i - pe) / (1.0 - pe);
        ss += (lin - ac1).powi(2);
    }
    let var = ss / (nf * (nf - 1.0));
    let se = var.max(0.0).sqrt();
    let z = Distribution::STANDARD_NORMAL.quantile(0.975);
    Ok(AgreementResult {
        ac1,
        std_error: se,
        ci_low: (ac1 - z * se).max(-1.0),
        ci_high: (ac1 + z * se).min(1.0),
        percent_agreement: pa,
        chance_agreement: pe,
        n_items: n,
        n_raters: raters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_agreement() {
        let ratings = vec![vec![1, 1], vec![2, 2], vec![3, 3], vec![3, 3]];
        let r = gwet_ac1(&ratings, 3).unwrap();
        assert_eq!(r.ac1, 1.0);
        assert_eq!((r.ci_low, r.ci_high), (1.0, 1.0));
    }

    #[test]
    fn total_disagreement_balanced_binary() {
        // pa = 0, pi = (.5, .5), pe = .5 → AC1 = -1
        let ratings = vec![vec![1, 2], vec![2, 1], vec![1, 2], vec![2, 1]];
        let r = gwet_ac1(&ratings, 2).unwrap();
        assert!((r.ac1 + 1.0).abs() < 1e-15);
        assert_eq!(r.percent_agreement, 0.0);
        assert!((r.chance_agreement - 0.5).abs() < 1e-15);
    }

    #[test]
    fn invalid_inputs() {
        assert!(gwet_ac1(&[vec![1, 1], vec![1, 1]], 1).is_err());
        assert!(gwet_ac1(&[vec![1, 4], vec![1, 1]], 3).is_err());
        assert!(gwet_ac1(&[vec![1, 1]], 3).is_err());
        assert!(gwet_ac1(&[vec![1, 1], vec![1]], 3).is_err());
    }
}
