//! Gradient boosting with least-squares stumps on the one-vs-rest logistic
//! loss.

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use super::stump::{best_regression_stump, presort, RegressionStump};
use crate::error::{Error, Result};

/// `F(x) = F_0 + lr * sum_m s_m(x)`, a log-odds score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbdtBinary {
    pub init: f64,
    pub learning_rate: f64,
    pub stages: Vec<RegressionStump>,
}

impl GbdtBinary {
    pub fn score(&self, x: &[f64]) -> f64 {
        self.init + self.learning_rate * self.stages.iter().map(|s| s.predict(x)).sum::<f64>()
    }
}

fn sigmoid(f: f64) -> f64 {
    1.0 / (1.0 + (-f).exp())
}

/// Mean logistic loss `log(1 + exp(-y' F))` with `y' = 2y - 1`.
pub fn logistic_loss(scores: &[f64], y: &[f64]) -> f64 {
    scores
        .iter()
        .zip(y)
        .map(|(f, t)| {
            let m = if *t > 0.5 { *f } else { -*f };
            // log(1 + e^-m), stable for both signs
            if m > 0.0 {
                (-m).exp().ln_1p()
            } else {
                -m + m.exp().ln_1p()
            }
        })
        .sum::<f64>()
        / scores.len().max(1) as f64
}

/// Fits exactly `rounds` stages to 0/1 targets. Returns the model and the
/// training loss before the first stage and after each stage.
pub fn gbdt_train_binary(x: ArrayView2<'_, f64>, y: &[f64], rounds: usize, learning_rate: f64) -> Result<(GbdtBinary, Vec<f64>)> {
    let n = x.nrows();
    if y.len() != n || n == 0 {
        return Err(Error::DimensionMismatch { expected: n, got: y.len() });
    }
    if !(learning_rate >= 0.0) {
        return Err(Error::invalid("learning rate must be non-negative"));
    }
    let p = (y.iter().sum::<f64>() / n as f64).clamp(1e-6, 1.0 - 1e-6);
    let init = (p / (1.0 - p)).ln();
    let sorted = presort(x);
    let rows: Vec<Vec<f64>> = x.rows().into_iter().map(|r| r.to_vec()).collect();
    let mut f = vec![init; n];
    let mut losses = vec![logistic_loss(&f, y)];
    let mut stages = Vec::with_capacity(rounds);
    let mut residual = vec![0.0; n];
    for _ in 0..rounds {
        for i in 0..n {
            residual[i] = y[i] - sigmoid(f[i]);
        }
        let s = best_regression_stump(x, &residual, &sorted);
        for (fi, row) in f.iter_mut().zip(&rows) {
            *fi += learning_rate * s.predict(row);
        }
        stages.push(s);
        losses.push(logistic_loss(&f, y));
    }
    Ok((GbdtBinary { init, learning_rate, stages }, losses))
}
