//! Least-squares helpers over nalgebra's Householder QR.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub(crate) struct OlsFit {
    pub coef: Vec<f64>,
    pub ssr: f64,
    /// (XᵀX)⁻¹, unscaled.
    pub xtx_inv: DMatrix<f64>,
}

/// Build a design matrix from rows.
pub(crate) fn design(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    let k = rows.first().map_or(0, |r| r.len());
    DMatrix::from_fn(n, k, |i, j| rows[i][j])
}

/// Ordinary least squares. Fails on rank-deficient designs.
pub(crate) fn ols(x: &DMatrix<f64>, y: &[f64]) -> Result<OlsFit> {
    let (n, k) = x.shape();
    if n < k || k == 0 {
        return Err(Error::Singular(format!("{n} observations for {k} regressors")));
    }
    let yv = DVector::from_column_slice(y);
    let qr = x.clone().qr();
    let r = qr.r();
    let max_diag = (0..k).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if (0..k).any(|i| r[(i, i)].abs() <= 1e-10 * max_diag.max(f64::MIN_POSITIVE)) {
        return Err(Error::Singular("collinear regressors".into()));
    }
    let qty = qr.q().transpose() * &yv;
    let coef = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::Singular("triangular solve failed".into()))?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| Error::Singular("triangular inverse failed".into()))?;
    let xtx_inv = &r_inv * r_inv.transpose();
    let fitted = x * &coef;
    let residuals: Vec<f64> = (0..n).map(|i| y[i] - fitted[i]).collect();
    let ssr = residuals.iter().map(|e| e * e).sum();
    Ok(OlsFit {
        coef: coef.iter().copied().collect(),
        ssr,
        xtx_inv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let rows: Vec<Vec<f64>> = (0..6).map(|i| vec![1.0, i as f64]).collect();
        let y: Vec<f64> = (0..6).map(|i| 2.0 + 0.5 * i as f64).collect();
        let fit = ols(&design(&rows), &y).unwrap();
        assert!((fit.coef[0] - 2.0).abs() < 1e-12);
        assert!((fit.coef[1] - 0.5).abs() < 1e-12);
        assert!(fit.ssr < 1e-20);
    }

    #[test]
    fn collinear_is_singular() {
        let rows: Vec<Vec<f64>> = (0..6).map(|i| vec![1.0, i as f64, 2.0 * i as f64]).collect();
        assert!(matches!(ols(&design(&rows), &[0.0; 6]), Err(Error::Singular(_))));
    }
}
