//! Augmented Dickey–Fuller test with a constant term.
//!
//! Lag order is chosen by AIC over 0..=max_lag on a common trimmed sample,
//! then the regression is refit on all observations available for the
//! chosen order. p values use MacKinnon's (1994) response surface for the
//! constant-only, single-series case.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::ols;
use crate::stats::Distribution;

// MacKinnon (1994), Table 3 / constant case, N = 1. Large-p coefficients
// are stored already rescaled by (1, 1e-1, 1e-1, 1e-2).
const TAU_MAX_C: f64 = 2.74;
const TAU_MIN_C: f64 = -18.83;
const TAU_STAR_C: f64 = -1.61;
const TAU_SMALLP_C: [f64; 3] = [2.1659, 1.4412, 0.038269];
const TAU_LARGEP_C: [f64; 4] = [1.7339, 0.93202, -0.12745, -0.010368];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdfResult {
    pub statistic: f64,
    pub p_value: f64,
    pub used_lag: usize,
    pub max_lag: usize,
    pub nobs: usize,
    /// Deterministic terms in the regression; always "c" here.
    pub regression: &'static str,
}

impl AdfResult {
    pub fn is_stationary(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AdfOptions {
    /// Upper bound on the lag search; defaults to ⌊12·(T/100)^¼⌋.
    pub max_lag: Option<usize>,
    /// Skip the AIC search and use exactly `max_lag` lags.
    pub fixed_lag: bool,
}

pub fn adf_test(series: &[f64]) -> Result<AdfResult> {
    adf_test_with(series, AdfOptions::default())
}

pub fn adf_test_with(series: &[f64], options: AdfOptions) -> Result<AdfResult> {
    let t = series.len();
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("adf_test: non-finite value"));
    }
    if t < 12 {
        return Err(Error::insufficient(format!("adf_test: series of length {t} is too short")));
    }
    let first = series[0];
    if series.iter().all(|v| *v == first) {
        return Err(Error::ZeroVariance("adf_test: constant series".into()));
    }
    let default_lag = (12.0 * (t as f64 / 100.0).powf(0.25)).floor() as usize;
    let cap = (t / 2).saturating_sub(2);
    let max_lag = options.max_lag.unwrap_or(default_lag).min(cap);
    if t - 1 - max_lag < 10 {
        return Err(Error::insufficient(format!(
            "adf_test: only {} observations after trimming {max_lag} lags",
            t - 1 - max_lag
        )));
    }
    let diff: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();

    let used_lag = if options.fixed_lag {
        max_lag
    } else {
        let mut best: Option<(f64, usize)> = None;
        for p in 0..=max_lag {
            let fit = regress(series, &diff, p, max_lag)?;
            let aic = fit.aic;
            if best.is_none_or(|(b, _)| aic < b) {
                best = Some((aic, p));
            }
        }
        best.expect("at least one lag").1
    };
    let fit = regress(series, &diff, used_lag, used_lag)?;
    Ok(AdfResult {
        statistic: fit.t_level,
        p_value: mackinnon_p(fit.t_level),
        used_lag,
        max_lag,
        nobs: fit.nobs,
        regression: "c",
    })
}

struct AdfFit {
    t_level: f64,
    aic: f64,
    nobs: usize,
}

// Δx_j on [1, x_j, Δx_{j-1}, …, Δx_{j-p}] for j = trim..diff.len().
fn regress(levels: &[f64], diff: &[f64], p: usize, trim: usize) -> Result<AdfFit> {
    let nobs = diff.len() - trim;
    let k = 2 + p;
    let x = DMatrix::from_fn(nobs, k, |i, c| {
        let j = i + trim;
        match c {
            0 => 1.0,
            1 => levels[j],
            lag => diff[j - (lag - 1)],
        }
    });
    let y = &diff[trim..];
    let fit = ols(&x, y)?;
    let n = nobs as f64;
    let sigma2 = fit.ssr / (n - k as f64);
    let se = (sigma2 * fit.xtx_inv[(1, 1)]).sqrt();
    let llf = -n / 2.0 * ((2.0 * std::f64::consts::PI).ln() + (fit.ssr / n).ln() + 1.0);
    Ok(AdfFit {
        t_level: fit.coef[1] / se,
        aic: -2.0 * llf + 2.0 * k as f64,
        nobs,
    })
}

/// Approximate p value for an ADF τ statistic (constant, one series).
pub fn mackinnon_p(tau: f64) -> f64 {
    if tau > TAU_MAX_C {
        return 1.0;
    }
    if tau < TAU_MIN_C {
        return 0.0;
    }
    let poly = |c: &[f64]| c.iter().rev().fold(0.0, |acc, &v| acc * tau + v);
    let z = if tau <= TAU_STAR_C {
        poly(&TAU_SMALLP_C)
    } else {
        poly(&TAU_LARGEP_C)
    };
    Distribution::STANDARD_NORMAL.cdf(z)
}
