//! Thin helpers over nalgebra's Cholesky factorization.

use nalgebra::DMatrix;
use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};

/// Lower Cholesky factor of a symmetric positive-definite matrix.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Cholesky {
    l: DMatrix<f64>,
}

impl Cholesky {
    pub fn new(a: ArrayView2<'_, f64>) -> Result<Self> {
        let d = a.nrows();
        if d == 0 || a.ncols() != d || a.iter().any(|v| !v.is_finite()) {
            return Err(Error::NotPositiveDefinite);
        }
        for i in 0..d {
            for j in 0..i {
                let (x, y) = (a[[i, j]], a[[j, i]]);
                if (x - y).abs() > 1e-9 * (1.0 + x.abs().max(y.abs())) {
                    return Err(Error::NotPositiveDefinite);
                }
            }
        }
        let m = DMatrix::from_fn(d, d, |i, j| a[[i, j]]);
        let chol = nalgebra::Cholesky::new(m).ok_or(Error::NotPositiveDefinite)?;
        let l = chol.unpack();
        if (0..d).any(|i| !(l[(i, i)] > 0.0) || !l[(i, i)].is_finite()) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self { l })
    }

    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.dim()).map(|i| self.l[(i, i)].ln()).sum::<f64>()
    }

    /// `v^T A^-1 v` by forward substitution.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        let d = self.dim();
        let mut z = vec![0.0; d];
        let mut acc = 0.0;
        for i in 0..d {
            let mut s = v[i];
            for (j, zj) in z.iter().enumerate().take(i) {
                s -= self.l[(i, j)] * zj;
            }
            z[i] = s / self.l[(i, i)];
            acc += z[i] * z[i];
        }
        acc
    }

    pub fn inverse(&self) -> Array2<f64> {
        let d = self.dim();
        let chol = nalgebra::Cholesky::new(&self.l * self.l.transpose()).expect("factor of an SPD matrix");
        let inv = chol.inverse();
        Array2::from_shape_fn((d, d), |(i, j)| inv[(i, j)])
    }
}

/// Factors `a`, adding growing multiples of the identity until it succeeds.
/// Returns the factor and the jitter that was added.
pub(crate) fn cholesky_with_jitter(a: &Array2<f64>, start: f64) -> Result<(Cholesky, f64)> {
    if let Ok(c) = Cholesky::new(a.view()) {
        return Ok((c, 0.0));
    }
    let d = a.nrows();
    let scale = (0..d).map(|i| a[[i, i]].abs()).sum::<f64>() / d.max(1) as f64;
    let mut jitter = start.max(1e-12 * scale);
    for _ in 0..12 {
        let mut b = a.clone();
        for i in 0..d {
            b[[i, i]] += jitter;
        }
        if let Ok(c) = Cholesky::new(b.view()) {
            return Ok((c, jitter));
        }
        jitter *= 10.0;
    }
    Err(Error::NotPositiveDefinite)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn log_det_quad_form_inverse() {
        let a = array![[4.0, 2.0], [2.0, 3.0]];
        let c = Cholesky::new(a.view()).unwrap();
        assert!((c.log_det() - 8f64.ln()).abs() < 1e-12);
        // A^-1 = [[3,-2],[-2,4]]/8
        let v = [1.0, 1.0];
        assert!((c.quad_form(&v) - 3.0 / 8.0).abs() < 1e-12);
        let inv = c.inverse();
        assert!((inv[[0, 1]] + 0.25).abs() < 1e-12 && (inv[[1, 1]] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_indefinite_and_asymmetric() {
        assert!(Cholesky::new(array![[1.0, 2.0], [2.0, 1.0]].view()).is_err());
        assert!(Cholesky::new(array![[1.0, 0.5], [0.0, 1.0]].view()).is_err());
        let (_, j) = cholesky_with_jitter(&array![[1.0, 1.0], [1.0, 1.0]], 1e-6).unwrap();
        assert!(j > 0.0);
    }
}
