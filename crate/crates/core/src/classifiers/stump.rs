//! Depth-1 decision trees: weighted classification stumps for boosting and
//! least-squares regression stumps for gradient boosting.

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

/// `h(x) = polarity` if `x[feature] > threshold`, else `-polarity`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stump {
    pub feature: usize,
    pub threshold: f64,
    pub polarity: f64,
}

impl Stump {
    pub fn predict(&self, x: &[f64]) -> f64 {
        if x[self.feature] > self.threshold {
            self.polarity
        } else {
            -self.polarity
        }
    }
}

/// Row indices of each column sorted by value (stable, so equal values keep
/// row order).
pub(crate) fn presort(x: ArrayView2<'_, f64>) -> Vec<Vec<usize>> {
    (0..x.ncols())
        .map(|f| {
            let mut idx: Vec<usize> = (0..x.nrows()).collect();
            idx.sort_by(|&a, &b| x[[a, f]].total_cmp(&x[[b, f]]));
            idx
        })
        .collect()
}

/// Candidate thresholds for one presorted column: below the minimum, then the
/// midpoints between consecutive distinct values. Calls `visit(threshold,
/// position)` where `position` rows (in sorted order) lie at or below the
/// threshold.
fn for_each_split(x: ArrayView2<'_, f64>, feature: usize, order: &[usize], mut visit: impl FnMut(f64, usize)) {
    let first = x[[order[0], feature]];
    visit(first - 1.0_f64.max(first.abs()), 0);
    for p in 1..order.len() {
        let (a, b) = (x[[order[p - 1], feature]], x[[order[p], feature]]);
        if b > a {
            visit(a + (b - a) / 2.0, p);
        }
    }
}

/// Stump minimizing the weighted error `sum_i D(i) [h(x_i) != y_i]` for
/// labels `y_i` in `{-1, +1}`. Returns the stump and its error. Ties keep the
/// lowest feature, then the lowest threshold, then polarity `+1`.
pub fn best_stump(x: ArrayView2<'_, f64>, y: &[f64], d: &[f64], sorted: &[Vec<usize>]) -> (Stump, f64) {
    let total: f64 = d.iter().sum();
    // weight of positives, the error of "always +1" is the negative weight
    let pos_total: f64 = y.iter().zip(d).filter(|(yi, _)| **yi > 0.0).map(|(_, w)| w).sum();
    let mut best = (
        Stump {
            feature: 0,
            threshold: f64::NEG_INFINITY,
            polarity: 1.0,
        },
        f64::INFINITY,
    );
    for (f, order) in sorted.iter().enumerate() {
        if order.is_empty() {
            continue;
        }
        // err(+1) = positives at or below + negatives above
        let mut pos_below = 0.0;
        let mut neg_below = 0.0;
        let mut cursor = 0;
        for_each_split(x, f, order, |thr, p| {
            while cursor < p {
                let i = order[cursor];
                if y[i] > 0.0 {
                    pos_below += d[i];
                } else {
                    neg_below += d[i];
                }
                cursor += 1;
            }
            let neg_above = (total - pos_total) - neg_below;
            let err_pos = pos_below + neg_above;
            let err_neg = total - err_pos;
            if err_pos < best.1 {
                best = (Stump { feature: f, threshold: thr, polarity: 1.0 }, err_pos);
            }
            if err_neg < best.1 {
                best = (Stump { feature: f, threshold: thr, polarity: -1.0 }, err_neg);
            }
        });
    }
    (best.0, best.1.max(0.0))
}

/// Piecewise-constant fit `left` if `x[feature] <= threshold`, else `right`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionStump {
    pub feature: usize,
    pub threshold: f64,
    pub left: f64,
    pub right: f64,
}

impl RegressionStump {
    pub fn predict(&self, x: &[f64]) -> f64 {
        if x[self.feature] > self.threshold {
            self.right
        } else {
            self.left
        }
    }
}

/// Least-squares stump; each leaf holds the mean target of its rows.
pub fn best_regression_stump(x: ArrayView2<'_, f64>, target: &[f64], sorted: &[Vec<usize>]) -> RegressionStump {
    let n = target.len();
    let total: f64 = target.iter().sum();
    let mean = if n > 0 { total / n as f64 } else { 0.0 };
    let mut best = RegressionStump {
        feature: 0,
        threshold: f64::INFINITY,
        left: mean,
        right: mean,
    };
    // maximize S_L^2/n_L + S_R^2/n_R, starting from the unsplit value
    let mut best_gain = if n > 0 { total * total / n as f64 } else { 0.0 };
    for (f, order) in sorted.iter().enumerate() {
        if order.is_empty() {
            continue;
        }
        let mut s_left = 0.0;
        let mut cursor = 0;
        for_each_split(x, f, order, |thr, p| {
            while cursor < p {
                s_left += target[order[cursor]];
                cursor += 1;
            }
            if p == 0 || p == n {
                return;
            }
            let s_right = total - s_left;
            let gain = s_left * s_left / p as f64 + s_right * s_right / (n - p) as f64;
            if gain > best_gain * (1.0 + 1e-12) + 1e-300 {
                best_gain = gain;
                best = RegressionStump {
                    feature: f,
                    threshold: thr,
                    left: s_left / p as f64,
                    right: s_right / (n - p) as f64,
                };
            }
        });
    }
    best
}
