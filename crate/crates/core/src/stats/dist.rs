//! Continuous distributions used for p-values and confidence intervals.

use serde::{Deserialize, Serialize};

use super::special::{erfc, inc_beta, inc_beta_complement, inc_gamma_lower, inc_gamma_upper};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Distribution {
    Normal { mean: f64, sd: f64 },
    StudentT { df: f64 },
    ChiSquare { df: f64 },
    FisherF { df1: f64, df2: f64 },
}

impl Distribution {
    pub const STANDARD_NORMAL: Distribution = Distribution::Normal { mean: 0.0, sd: 1.0 };

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Distribution::Normal { mean, sd } => mean.is_finite() && sd > 0.0 && sd.is_finite(),
            Distribution::StudentT { df } | Distribution::ChiSquare { df } => df > 0.0,
            Distribution::FisherF { df1, df2 } => df1 > 0.0 && df2 > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("invalid distribution parameters {self:?}")))
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Distribution::Normal { mean, sd } => 0.5 * erfc(-(x - mean) / (sd * std::f64::consts::SQRT_2)),
            Distribution::StudentT { df } => {
                let tail = 0.5 * inc_beta(df / 2.0, 0.5, df / (df + x * x));
                if x >= 0.0 {
                    1.0 - tail
                } else {
                    tail
                }
            }
            Distribution::ChiSquare { df } => inc_gamma_lower(df / 2.0, x.max(0.0) / 2.0),
            Distribution::FisherF { df1, df2 } => {
                if x <= 0.0 {
                    0.0
                } else {
                    inc_beta(df1 / 2.0, df2 / 2.0, df1 * x / (df1 * x + df2))
                }
            }
        }
    }

    /// Upper tail 1 − F(x), evaluated directly for precision in the tail.
    pub fn sf(&self, x: f64) -> f64 {
        match *self {
            Distribution::Normal { mean, sd } => 0.5 * erfc((x - mean) / (sd * std::f64::consts::SQRT_2)),
            Distribution::StudentT { df } => {
                let tail = 0.5 * inc_beta(df / 2.0, 0.5, df / (df + x * x));
                if x >= 0.0 {
                    tail
                } else {
                    1.0 - tail
                }
            }
            Distribution::ChiSquare { df } => inc_gamma_upper(df / 2.0, x.max(0.0) / 2.0),
            Distribution::FisherF { df1, df2 } => {
                if x <= 0.0 {
                    1.0
                } else {
                    inc_beta_complement(df1 / 2.0, df2 / 2.0, df1 * x / (df1 * x + df2))
                }
            }
        }
    }

    /// Inverse CDF by bracketed bisection. `p` must lie in (0, 1).
    pub fn quantile(&self, p: f64) -> f64 {
        if !(p > 0.0 && p < 1.0) {
            return match p {
                0.0 => self.support().0,
                1.0 => f64::INFINITY,
                _ => f64::NAN,
            };
        }
        let (lower_bound, _) = self.support();
        let (mut lo, mut hi) = if lower_bound == 0.0 { (0.0, 1.0) } else { (-1.0, 1.0) };
        while self.cdf(hi) < p {
            hi *= 2.0;
            if hi > 1e300 {
                return f64::INFINITY;
            }
        }
        if lower_bound != 0.0 {
            while self.cdf(lo) > p {
                lo *= 2.0;
                if lo < -1e300 {
                    return f64::NEG_INFINITY;
                }
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn support(&self) -> (f64, f64) {
        match self {
            Distribution::Normal { .. } | Distribution::StudentT { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Distribution::ChiSquare { .. } | Distribution::FisherF { .. } => (0.0, f64::INFINITY),
        }
    }
}

/// Validated CDF evaluation.
pub fn dist_cdf(dist: Distribution, x: f64) -> Result<f64> {
    dist.validate()?;
    if x.is_nan() {
        return Err(Error::invalid("cdf evaluated at NaN"));
    }
    Ok(dist.cdf(x))
}

/// Two-sided p for a t statistic.
pub fn t_two_sided(t: f64, df: f64) -> f64 {
    inc_beta(df / 2.0, 0.5, df / (df + t * t)).clamp(0.0, 1.0)
}

/// Two-sided p for a standard-normal statistic.
pub fn z_two_sided(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}
