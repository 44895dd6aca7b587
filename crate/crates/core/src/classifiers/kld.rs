//! Kullback-Leibler divergence between Gaussians.

use ndarray::{Array1, Array2};

use super::linalg::Cholesky;
use crate::error::{Error, Result};

/// `KL(A || B)` for `A = N(mu_a, S_a)`, `B = N(mu_b, S_b)`:
/// `1/2 [tr(S_b^-1 S_a) + (mu_b - mu_a)' S_b^-1 (mu_b - mu_a) - d + ln(|S_b| / |S_a|)]`.
pub fn kld_gaussian(mu_a: &Array1<f64>, cov_a: &Array2<f64>, mu_b: &Array1<f64>, cov_b: &Array2<f64>) -> Result<f64> {
    let d = mu_a.len();
    for got in [mu_b.len(), cov_a.nrows(), cov_a.ncols(), cov_b.nrows(), cov_b.ncols()] {
        if got != d {
            return Err(Error::DimensionMismatch { expected: d, got });
        }
    }
    let ca = Cholesky::new(cov_a.view())?;
    let cb = Cholesky::new(cov_b.view())?;
    let inv_b = cb.inverse();
    let trace: f64 = (0..d).map(|i| (0..d).map(|j| inv_b[[i, j]] * cov_a[[j, i]]).sum::<f64>()).sum();
    let diff: Vec<f64> = mu_b.iter().zip(mu_a.iter()).map(|(b, a)| b - a).collect();
    Ok(0.5 * (trace + cb.quad_form(&diff) - d as f64 + cb.log_det() - ca.log_det()))
}
