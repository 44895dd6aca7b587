//! Soft-margin support vector machine trained on the dual by sequential
//! minimal optimization with maximal-violating-pair working sets.

use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Kernel {
    Linear,
    /// `exp(-gamma |x - z|^2)`; `gamma = None` means `1 / d`.
    Rbf { gamma: Option<f64> },
}

impl Kernel {
    fn resolve(self, d: usize) -> Kernel {
        match self {
            Kernel::Rbf { gamma: None } => Kernel::Rbf {
                gamma: Some(1.0 / d.max(1) as f64),
            },
            k => k,
        }
    }

    pub fn eval(&self, a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
        match self {
            Kernel::Linear => a.dot(&b),
            Kernel::Rbf { gamma } => {
                let g = gamma.unwrap_or(1.0 / a.len().max(1) as f64);
                let d2: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x - y).powi(2)).sum();
                (-g * d2).exp()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SvmOptions {
    pub kernel: Kernel,
    /// Box constraint `0 <= alpha_i <= C`.
    pub c: f64,
    /// Stop when the maximal KKT violation drops to this value.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SvmOptions {
    fn default() -> Self {
        Self {
            kernel: Kernel::Rbf { gamma: None },
            c: 1.0,
            tol: 1e-3,
            max_iter: 100_000,
        }
    }
}

/// Binary decision function `f(x) = sum_i alpha_i y_i K(x_i, x) + b` over the
/// support vectors (`alpha_i > 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub kernel: Kernel,
    pub c: f64,
    pub support_vectors: Array2<f64>,
    pub alphas: Vec<f64>,
    /// `+1` or `-1` per support vector.
    pub labels: Vec<f64>,
    pub bias: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl SvmModel {
    pub fn decision(&self, x: ArrayView1<'_, f64>) -> f64 {
        self.support_vectors
            .rows()
            .into_iter()
            .zip(self.alphas.iter().zip(&self.labels))
            .map(|(sv, (a, y))| a * y * self.kernel.eval(sv, x))
            .sum::<f64>()
            + self.bias
    }

    /// Primal weights `w = sum_i alpha_i y_i x_i`, linear kernel only.
    pub fn primal_weights(&self) -> Option<Vec<f64>> {
        if self.kernel != Kernel::Linear {
            return None;
        }
        let mut w = vec![0.0; self.support_vectors.ncols()];
        for (sv, (a, y)) in self.support_vectors.rows().into_iter().zip(self.alphas.iter().zip(&self.labels)) {
            for (wj, xj) in w.iter_mut().zip(sv.iter()) {
                *wj += a * y * xj;
            }
        }
        Some(w)
    }

    /// `sum_i alpha_i y_i`, zero at a feasible dual point.
    pub fn equality_residual(&self) -> f64 {
        self.alphas.iter().zip(&self.labels).map(|(a, y)| a * y).sum()
    }
}

/// Gram matrix of the rows of `x`, row-major.
pub(crate) fn gram(x: ArrayView2<'_, f64>, kernel: Kernel) -> Vec<f64> {
    let n = x.nrows();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let v = kernel.eval(x.row(i), x.row(j));
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    k
}

/// Trains a binary SVM on labels in `{-1, +1}`.
pub fn svm_train(x: ArrayView2<'_, f64>, y: &[f64], opts: &SvmOptions) -> Result<SvmModel> {
    let kernel = opts.kernel.resolve(x.ncols());
    let k = gram(x, kernel);
    svm_train_gram(x, &k, y, kernel, opts)
}

pub(crate) fn svm_train_gram(x: ArrayView2<'_, f64>, k: &[f64], y: &[f64], kernel: Kernel, opts: &SvmOptions) -> Result<SvmModel> {
    let n = x.nrows();
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y.len() });
    }
    if y.iter().any(|v| *v != 1.0 && *v != -1.0) {
        return Err(Error::invalid("SVM labels must be -1 or +1"));
    }
    if !(y.contains(&1.0) && y.contains(&-1.0)) {
        return Err(Error::Training("SVM needs both labels present".into()));
    }
    if !(opts.c > 0.0) {
        return Err(Error::invalid("SVM needs C > 0"));
    }
    const TAU: f64 = 1e-12;
    let c = opts.c;
    let q = |i: usize, j: usize| y[i] * y[j] * k[i * n + j];
    let mut alpha = vec![0.0; n];
    // gradient of 1/2 a'Qa - e'a
    let mut g = vec![-1.0; n];
    let in_up = |a: f64, yi: f64| (yi > 0.0 && a < c) || (yi < 0.0 && a > 0.0);
    let in_low = |a: f64, yi: f64| (yi > 0.0 && a > 0.0) || (yi < 0.0 && a < c);

    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        let (mut i, mut gmax) = (usize::MAX, f64::NEG_INFINITY);
        let (mut j, mut gmin) = (usize::MAX, f64::INFINITY);
        for t in 0..n {
            let v = -y[t] * g[t];
            if in_up(alpha[t], y[t]) && v > gmax {
                gmax = v;
                i = t;
            }
            if in_low(alpha[t], y[t]) && v < gmin {
                gmin = v;
                j = t;
            }
        }
        if i == usize::MAX || j == usize::MAX || gmax - gmin <= opts.tol {
            converged = true;
            break;
        }
        iterations += 1;
        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let mut quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-g[i] - g[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let mut quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (g[i] - g[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            g[t] += q(t, i) * di + q(t, j) * dj;
        }
    }
    if !converged {
        log::warn!("SVM: no convergence after {iterations} iterations; returning last iterate");
    }

    // rho from free vectors, else the midpoint of the feasible interval
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free, mut sum_free) = (0usize, 0.0);
    for t in 0..n {
        let yg = y[t] * g[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum_free += yg;
        }
    }
    let rho = if free > 0 { sum_free / free as f64 } else { (ub + lb) / 2.0 };

    let sv: Vec<usize> = (0..n).filter(|&t| alpha[t] > 0.0).collect();
    let mut support_vectors = Array2::zeros((sv.len(), x.ncols()));
    for (r, &t) in sv.iter().enumerate() {
        support_vectors.row_mut(r).assign(&x.row(t));
    }
    Ok(SvmModel {
        kernel,
        c,
        support_vectors,
        alphas: sv.iter().map(|&t| alpha[t]).collect(),
        labels: sv.iter().map(|&t| y[t]).collect(),
        bias: -rho,
        converged,
        iterations,
    })
}
