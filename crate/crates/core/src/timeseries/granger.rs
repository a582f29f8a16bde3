//! Granger causality F tests over a range of lags.
//!
//! At lag L both models use the T − L observations that have a full lag
//! history, so restricted and unrestricted fits are nested on identical
//! rows.

use serde::Serialize;

use super::adf::adf_test;
use super::difference;
use crate::error::{Error, Result};
use crate::linalg::{design, ols};
use crate::stats::Distribution;

pub const MAX_GRANGER_LAG: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrangerLag {
    pub lag: usize,
    pub f: f64,
    pub df1: usize,
    pub df2: usize,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrangerResult {
    pub lags: Vec<GrangerLag>,
    /// Lags dropped because the unrestricted model had no residual df.
    pub skipped: Vec<usize>,
    pub x_diff_order: usize,
    pub y_diff_order: usize,
}

impl GrangerResult {
    pub fn at(&self, lag: usize) -> Option<&GrangerLag> {
        self.lags.iter().find(|l| l.lag == lag)
    }
}

/// Test whether `x` Granger-causes `y` at lags 1..=max_lag.
pub fn granger_test(x: &[f64], y: &[f64], max_lag: usize) -> Result<GrangerResult> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "granger_test: series lengths differ ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if max_lag == 0 || max_lag > MAX_GRANGER_LAG {
        return Err(Error::invalid(format!("granger_test: max_lag must be in 1..={MAX_GRANGER_LAG}")));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::invalid("granger_test: non-finite value"));
    }
    let t = x.len();
    let mut lags = Vec::new();
    let mut skipped = Vec::new();
    for lag in 1..=max_lag {
        if t <= lag || t - lag <= 2 * lag + 1 {
            skipped.push(lag);
            continue;
        }
        lags.push(one_lag(x, y, lag)?);
    }
    if lags.is_empty() {
        return Err(Error::insufficient(format!("granger_test: series of length {t} too short for any lag")));
    }
    Ok(GrangerResult {
        lags,
        skipped,
        x_diff_order: 0,
        y_diff_order: 0,
    })
}

fn one_lag(x: &[f64], y: &[f64], lag: usize) -> Result<GrangerLag> {
    let t = x.len();
    let target: Vec<f64> = y[lag..].to_vec();
    let mut restricted = Vec::with_capacity(t - lag);
    let mut full = Vec::with_capacity(t - lag);
    for i in lag..t {
        let mut row = Vec::with_capacity(2 * lag + 1);
        row.push(1.0);
        row.extend((1..=lag).map(|j| y[i - j]));
        restricted.push(row.clone());
        row.extend((1..=lag).map(|j| x[i - j]));
        full.push(row);
    }
    let r = ols(&design(&restricted), &target)?;
    let u = ols(&design(&full), &target)?;
    let df2 = t - lag - 2 * lag - 1;
    let scale = target.iter().map(|v| v * v).sum::<f64>().max(f64::MIN_POSITIVE);
    let (f, p_value) = if u.ssr <= 1e-24 * scale {
        (f64::INFINITY, 0.0)
    } else {
        let f = ((r.ssr - u.ssr).max(0.0) / lag as f64) / (u.ssr / df2 as f64);
        let p = Distribution::FisherF {
            df1: lag as f64,
            df2: df2 as f64,
        }
        .sf(f);
        (f, p)
    };
    Ok(GrangerLag {
        lag,
        f,
        df1: lag,
        df2,
        p_value,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrangerPipeline {
    pub x_adf_p: Vec<f64>,
    pub y_adf_p: Vec<f64>,
    pub result: GrangerResult,
}

/// Difference each series until the ADF test rejects a unit root at
/// `alpha` (at most twice), align the tails, then run the F tests.
pub fn granger_pipeline(x: &[f64], y: &[f64], max_lag: usize, alpha: f64) -> Result<GrangerPipeline> {
    if x.len() != y.len() {
        return Err(Error::invalid("granger_pipeline: series lengths differ"));
    }
    let (xs, x_order, x_adf_p) = make_stationary(x, alpha)?;
    let (ys, y_order, y_adf_p) = make_stationary(y, alpha)?;
    let n = xs.len().min(ys.len());
    let mut result = granger_test(&xs[xs.len() - n..], &ys[ys.len() - n..], max_lag)?;
    result.x_diff_order = x_order;
    result.y_diff_order = y_order;
    Ok(GrangerPipeline {
        x_adf_p,
        y_adf_p,
        result,
    })
}

fn make_stationary(series: &[f64], alpha: f64) -> Result<(Vec<f64>, usize, Vec<f64>)> {
    let mut current = series.to_vec();
    let mut pvals = Vec::new();
    for order in 0..=2 {
        let p = adf_test(&current)?.p_value;
        pvals.push(p);
        if p < alpha || order == 2 {
            return Ok((current, order, pvals));
        }
        current = difference(&current, 1)?;
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn noise(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
    }

    #[test]
    fn df_pattern() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = noise(&mut rng, 82);
        let y = noise(&mut rng, 82);
        let res = granger_test(&x, &y, 5).unwrap();
        assert_eq!(res.at(5).unwrap().df2, 66);
        assert_eq!(res.at(1).unwrap().df2, 78);
    }

    #[test]
    fn detects_lag_one_dependence() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = noise(&mut rng, 200);
        let e = noise(&mut rng, 200);
        let mut y = vec![0.0; 200];
        for t in 1..200 {
            y[t] = 0.9 * x[t - 1] + 0.1 * e[t];
        }
        let res = granger_test(&x, &y, 2).unwrap();
        assert!(res.at(1).unwrap().p_value < 0.01);
    }

    #[test]
    fn affine_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = noise(&mut rng, 60);
        let y = noise(&mut rng, 60);
        let x2: Vec<f64> = x.iter().map(|v| 3.0 * v - 7.0).collect();
        let y2: Vec<f64> = y.iter().map(|v| -0.5 * v + 2.0).collect();
        let a = granger_test(&x, &y, 4).unwrap();
        let b = granger_test(&x2, &y2, 4).unwrap();
        for (l, m) in a.lags.iter().zip(&b.lags) {
            assert!((l.f - m.f).abs() < 1e-8 * l.f.max(1.0));
        }
    }

    #[test]
    fn short_series_skips_lags() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = noise(&mut rng, 12);
        let y = noise(&mut rng, 12);
        let res = granger_test(&x, &y, 5).unwrap();
        assert!(res.skipped.contains(&4) && res.skipped.contains(&5));
        assert!(res.lags.iter().all(|l| l.df2 > 0));
        assert!(granger_test(&x, &y, 21).is_err());
    }
}
