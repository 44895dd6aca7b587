//! Discrete Adaboost over decision stumps.

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use super::stump::{best_stump, presort, Stump};
use crate::error::{Error, Result};

/// Floor on the weighted error so a perfect stump gets a finite weight.
pub const MIN_ERROR: f64 = 1e-10;

/// `H(x) = sign(sum_t alpha_t h_t(x))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaboostModel {
    pub stumps: Vec<Stump>,
    pub alphas: Vec<f64>,
}

impl AdaboostModel {
    /// The real-valued margin `sum_t alpha_t h_t(x)`.
    pub fn score(&self, x: &[f64]) -> f64 {
        self.stumps.iter().zip(&self.alphas).map(|(s, a)| a * s.predict(x)).sum()
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        if self.score(x) >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn rounds(&self) -> usize {
        self.stumps.len()
    }
}

/// Per-round diagnostics of one training run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AdaboostTrace {
    /// Weighted error of each accepted stump (before flooring).
    pub errors: Vec<f64>,
    /// Normalizer `Z_t` of each round.
    pub normalizers: Vec<f64>,
    /// `sum_i D_{t+1}(i)` after each renormalization.
    pub weight_sums: Vec<f64>,
}

impl AdaboostTrace {
    /// `prod_{s <= t} Z_s` for every round, the bound on training error.
    pub fn loss_bound(&self) -> Vec<f64> {
        self.normalizers
            .iter()
            .scan(1.0, |acc, z| {
                *acc *= z;
                Some(*acc)
            })
            .collect()
    }
}

/// Trains up to `rounds` stumps on labels in `{-1, +1}`. Stops early when no
/// stump beats chance or a stump is perfect.
pub fn adaboost_train(x: ArrayView2<'_, f64>, y: &[f64], rounds: usize) -> Result<(AdaboostModel, AdaboostTrace)> {
    let n = x.nrows();
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y.len() });
    }
    if y.iter().any(|v| *v != 1.0 && *v != -1.0) {
        return Err(Error::invalid("Adaboost labels must be -1 or +1"));
    }
    if !(y.contains(&1.0) && y.contains(&-1.0)) {
        return Err(Error::Training("Adaboost needs both labels present".into()));
    }
    let sorted = presort(x);
    let rows: Vec<Vec<f64>> = x.rows().into_iter().map(|r| r.to_vec()).collect();
    let mut d = vec![1.0 / n as f64; n];
    let mut model = AdaboostModel {
        stumps: Vec::new(),
        alphas: Vec::new(),
    };
    let mut trace = AdaboostTrace::default();
    for _ in 0..rounds {
        let (stump, err) = best_stump(x, y, &d, &sorted);
        if err >= 0.5 {
            break;
        }
        let eps = err.max(MIN_ERROR);
        let alpha = 0.5 * ((1.0 - eps) / eps).ln();
        let mut z = 0.0;
        for (i, row) in rows.iter().enumerate() {
            d[i] *= (-alpha * y[i] * stump.predict(row)).exp();
            z += d[i];
        }
        d.iter_mut().for_each(|w| *w /= z);
        trace.errors.push(err);
        trace.normalizers.push(z);
        trace.weight_sums.push(d.iter().sum());
        model.stumps.push(stump);
        model.alphas.push(alpha);
        if err <= 0.0 {
            break;
        }
    }
    Ok((model, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn separable_in_one_round() {
        let x = array![[0.0], [1.0], [2.0], [3.0]];
        let y = [-1.0, -1.0, 1.0, 1.0];
        let (m, t) = adaboost_train(x.view(), &y, 10).unwrap();
        assert_eq!(m.rounds(), 1);
        assert!(m.alphas[0].is_finite());
        assert_eq!(t.errors, vec![0.0]);
        for (r, yi) in x.rows().into_iter().zip(y) {
            assert_eq!(m.predict(&r.to_vec()), yi);
        }
    }

    #[test]
    fn single_class_is_an_error() {
        let x = array![[0.0], [1.0]];
        assert!(adaboost_train(x.view(), &[1.0, 1.0], 5).is_err());
        assert!(adaboost_train(x.view(), &[1.0, 0.0], 5).is_err());
    }

    #[test]
    fn weights_renormalize_and_bound_decreases() {
        let x = array![[0.0, 1.0], [1.0, 0.0], [1.0, 1.0], [0.0, 0.0], [0.5, 0.2], [0.2, 0.9]];
        let y = [1.0, 1.0, -1.0, -1.0, 1.0, -1.0];
        let (_, t) = adaboost_train(x.view(), &y, 20).unwrap();
        assert!(t.weight_sums.iter().all(|s| (s - 1.0).abs() < 1e-12));
        assert!(t.errors.iter().all(|e| *e < 0.5));
        let b = t.loss_bound();
        assert!(b.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    }
}
