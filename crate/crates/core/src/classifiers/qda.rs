//! Quadratic discriminant analysis with covariance shrinkage.

use std::f64::consts::PI;
use std::sync::OnceLock;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use super::linalg::{cholesky_with_jitter, Cholesky};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QdaClass {
    pub mean: Array1<f64>,
    /// Shrunk (and, if needed, jittered) covariance.
    pub covariance: Array2<f64>,
    pub log_prior: f64,
    #[serde(skip)]
    factor: OnceLock<Cholesky>,
}

impl PartialEq for QdaClass {
    fn eq(&self, o: &Self) -> bool {
        self.mean == o.mean && self.covariance == o.covariance && self.log_prior == o.log_prior
    }
}

impl QdaClass {
    fn factor(&self) -> &Cholesky {
        self.factor
            .get_or_init(|| Cholesky::new(self.covariance.view()).expect("validated covariance"))
    }

    /// `ln pi_k + ln N(x; mu_k, Sigma_k)`.
    pub fn discriminant(&self, x: ArrayView1<'_, f64>) -> f64 {
        let diff: Vec<f64> = x.iter().zip(self.mean.iter()).map(|(a, b)| a - b).collect();
        let f = self.factor();
        let d = diff.len() as f64;
        self.log_prior - 0.5 * (d * (2.0 * PI).ln() + f.log_det() + f.quad_form(&diff))
    }

    /// Precision matrix `Sigma^-1`.
    pub fn precision(&self) -> Array2<f64> {
        self.factor().inverse()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QdaModel {
    /// Indexed by class; `None` for classes absent from training.
    pub classes: Vec<Option<QdaClass>>,
    pub shrinkage: f64,
}

impl QdaModel {
    /// Per-class discriminants; absent classes score `-inf`.
    pub fn scores(&self, x: ArrayView1<'_, f64>) -> Vec<f64> {
        self.classes
            .iter()
            .map(|c| c.as_ref().map_or(f64::NEG_INFINITY, |c| c.discriminant(x)))
            .collect()
    }

    pub(crate) fn validate(&self) -> Result<()> {
        for c in self.classes.iter().flatten() {
            Cholesky::new(c.covariance.view())?;
        }
        Ok(())
    }
}

/// Per-class Gaussian MLE with `Sigma <- (1 - rho) Sigma + rho diag(Sigma)`.
pub fn qda_fit(x: ArrayView2<'_, f64>, labels: &[usize], n_classes: usize, shrinkage: f64) -> Result<QdaModel> {
    let (n, d) = x.dim();
    if labels.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: labels.len() });
    }
    if !(0.0..=1.0).contains(&shrinkage) {
        return Err(Error::invalid("shrinkage must lie in [0, 1]"));
    }
    if n == 0 || d == 0 {
        return Err(Error::invalid("QDA needs data"));
    }
    let mut classes = Vec::with_capacity(n_classes);
    for k in 0..n_classes {
        let rows: Vec<usize> = (0..n).filter(|&i| labels[i] == k).collect();
        if rows.is_empty() {
            log::debug!("QDA: class {k} absent from training data");
            classes.push(None);
            continue;
        }
        let xk = x.select(Axis(0), &rows);
        let mean = xk.mean_axis(Axis(0)).expect("non-empty");
        let centered = &xk - &mean;
        let mut cov = centered.t().dot(&centered) / rows.len() as f64;
        for a in 0..d {
            for b in 0..d {
                if a != b {
                    cov[[a, b]] *= 1.0 - shrinkage;
                }
            }
        }
        let (_, jitter) = cholesky_with_jitter(&cov, 1e-6)?;
        if jitter > 0.0 {
            log::debug!("QDA: class {k} covariance singular after shrinkage, added {jitter:e} I");
            cov.diag_mut().mapv_inplace(|v| v + jitter);
        }
        classes.push(Some(QdaClass {
            mean,
            covariance: cov,
            log_prior: (rows.len() as f64 / n as f64).ln(),
            factor: OnceLock::new(),
        }));
    }
    Ok(QdaModel { classes, shrinkage })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn point_at_mean_wins_with_equal_priors() {
        let x = array![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [5.0, 5.0], [6.0, 5.0], [5.0, 6.0], [6.0, 6.0]];
        let y = [0, 0, 0, 0, 1, 1, 1, 1];
        let m = qda_fit(x.view(), &y, 2, 0.1).unwrap();
        let s = m.scores(array![0.5, 0.5].view());
        assert!(s[0] > s[1]);
        let s = m.scores(array![5.5, 5.5].view());
        assert!(s[1] > s[0]);
    }

    #[test]
    fn singleton_class_gets_jitter() {
        let x = array![[0.0], [1.0], [2.0]];
        let m = qda_fit(x.view(), &[0, 0, 1], 3, 0.1).unwrap();
        let c = m.classes[1].as_ref().unwrap();
        assert!(c.covariance[[0, 0]] > 0.0);
        assert!(m.classes[2].is_none());
        assert_eq!(m.scores(array![2.0].view())[2], f64::NEG_INFINITY);
    }

    #[test]
    fn shrinkage_only_touches_off_diagonal() {
        let x = array![[0.0, 0.0], [1.0, 1.0], [2.0, 2.5], [3.0, 2.0]];
        let a = qda_fit(x.view(), &[0; 4], 1, 0.0).unwrap();
        let b = qda_fit(x.view(), &[0; 4], 1, 0.1).unwrap();
        let (ca, cb) = (&a.classes[0].as_ref().unwrap().covariance, &b.classes[0].as_ref().unwrap().covariance);
        assert_eq!(ca[[0, 0]], cb[[0, 0]]);
        assert!((cb[[0, 1]] - 0.9 * ca[[0, 1]]).abs() < 1e-12);
    }
}
