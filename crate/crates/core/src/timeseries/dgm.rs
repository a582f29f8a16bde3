//! Discontinuous growth model: y ~ Time + ONSET + POST with AR(1) errors.
//!
//! Time counts months from the first observed month, ONSET is 1 from the
//! onset month on, POST counts months elapsed since the onset month (0 at
//! and before it). The AR(1) coefficient maximizes the profile likelihood
//! of the Prais–Winsten transformed regression over a fixed grid, so the
//! fit is deterministic and derivative-free.

use serde::Serialize;

use super::VarianceSeries;
use crate::corpus::Month;
use crate::error::{Error, Result};
use crate::linalg::{design, ols};
use crate::stats::Distribution;

pub const TERM_NAMES: [&str; 4] = ["Intercept", "Time", "ONSET", "POST"];

#[derive(Debug, Clone, PartialEq)]
pub enum RhoSearch {
    /// Evenly spaced values from `lo` to `hi` inclusive.
    Grid { lo: f64, hi: f64, step: f64 },
    Fixed(f64),
}

impl Default for RhoSearch {
    fn default() -> Self {
        RhoSearch::Grid {
            lo: -0.99,
            hi: 0.99,
            step: 0.01,
        }
    }
}

impl RhoSearch {
    fn candidates(&self) -> Vec<f64> {
        match *self {
            RhoSearch::Fixed(r) => vec![r],
            RhoSearch::Grid { lo, hi, step } => {
                let n = ((hi - lo) / step).round() as i64;
                (0..=n).map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12).collect()
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DgmOptions {
    pub rho: RhoSearch,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DgmTerm {
    pub term: &'static str,
    pub estimate: f64,
    pub std_error: f64,
    pub t: f64,
    pub p_value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DgmResult {
    pub terms: Vec<DgmTerm>,
    pub ar1_rho: f64,
    pub n_obs: usize,
    pub df: usize,
    pub log_likelihood: f64,
}

impl DgmResult {
    pub fn term(&self, name: &str) -> &DgmTerm {
        self.terms.iter().find(|t| t.term == name).expect("known term")
    }
}

/// Fit on the non-missing months of a variance series.
///
/// Missing months are dropped; the AR(1) structure then links consecutive
/// observed months while Time and POST keep calendar spacing.
pub fn fit_dgm(series: &VarianceSeries, onset: Month, options: &DgmOptions) -> Result<DgmResult> {
    let obs = series.composite_observations();
    let months: Vec<Month> = obs.iter().map(|(m, _)| *m).collect();
    let values: Vec<f64> = obs.iter().map(|(_, v)| *v).collect();
    fit_dgm_values(&months, &values, onset, options)
}

pub fn fit_dgm_values(months: &[Month], values: &[f64], onset: Month, options: &DgmOptions) -> Result<DgmResult> {
    if months.len() != values.len() {
        return Err(Error::invalid("months and values differ in length"));
    }
    if months.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("months must be strictly increasing"));
    }
    let n = months.len();
    if n < 8 {
        return Err(Error::insufficient(format!("growth model needs at least 8 months, have {n}")));
    }
    let pre = months.iter().filter(|m| **m < onset).count();
    if pre == 0 || pre == n {
        return Err(Error::insufficient("growth model needs months on both sides of the onset"));
    }
    let start = months[0].index();
    let rows: Vec<Vec<f64>> = months
        .iter()
        .map(|m| {
            let after = m.index() - onset.index();
            vec![
                1.0,
                (m.index() - start) as f64,
                if after >= 0 { 1.0 } else { 0.0 },
                after.max(0) as f64,
            ]
        })
        .collect();
    fit_ar1_gls(&rows, values, &options.rho)
}

pub(crate) fn prais_winsten(rows: &[Vec<f64>], y: &[f64], rho: f64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let head = (1.0 - rho * rho).sqrt();
    let mut xs = Vec::with_capacity(rows.len());
    let mut ys = Vec::with_capacity(y.len());
    xs.push(rows[0].iter().map(|v| v * head).collect());
    ys.push(y[0] * head);
    for t in 1..rows.len() {
        xs.push(rows[t].iter().zip(&rows[t - 1]).map(|(a, b)| a - rho * b).collect());
        ys.push(y[t] - rho * y[t - 1]);
    }
    (xs, ys)
}

fn fit_ar1_gls(rows: &[Vec<f64>], y: &[f64], search: &RhoSearch) -> Result<DgmResult> {
    let n = rows.len();
    let k = rows[0].len();
    if let RhoSearch::Fixed(r) = search {
        if !(r.abs() < 1.0) {
            return Err(Error::invalid(format!("AR(1) coefficient {r} outside (-1, 1)")));
        }
    }
    let nf = n as f64;
    let mut best: Option<(f64, f64)> = None;
    for rho in search.candidates() {
        let (xs, ys) = prais_winsten(rows, y, rho);
        let fit = ols(&design(&xs), &ys)?;
        // profile log-likelihood with σ² concentrated out
        let ll = -nf / 2.0 * ((2.0 * std::f64::consts::PI).ln() + (fit.ssr / nf).ln() + 1.0)
            + 0.5 * (1.0 - rho * rho).ln();
        if best.is_none_or(|(b, _)| ll > b) {
            best = Some((ll, rho));
        }
    }
    let (ll, rho) = best.ok_or_else(|| Error::invalid("empty AR(1) grid"))?;
    let (xs, ys) = prais_winsten(rows, y, rho);
    let fit = ols(&design(&xs), &ys)?;
    let df = n - k;
    let sigma2 = fit.ssr / df as f64;
    let tdist = Distribution::StudentT { df: df as f64 };
    let crit = tdist.quantile(0.975);
    let terms = (0..k)
        .map(|j| {
            let se = (sigma2 * fit.xtx_inv[(j, j)]).sqrt();
            let est = fit.coef[j];
            let t = est / se;
            DgmTerm {
                term: TERM_NAMES[j],
                estimate: est,
                std_error: se,
                t,
                p_value: crate::stats::dist::t_two_sided(t, df as f64),
                ci_low: est - crit * se,
                ci_high: est + crit * se,
            }
        })
        .collect();
    Ok(DgmResult {
        terms,
        ar1_rho: rho,
        n_obs: n,
        df,
        log_likelihood: ll,
    })
}
