//! Confusion matrices and the per-class metrics derived from them.

use serde::{Deserialize, Serialize};

use crate::class::Class;

/// `counts[true][predicted]` over the four classes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; Class::COUNT]; Class::COUNT],
}

/// One-vs-rest collapse of a confusion matrix for one class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn add(&mut self, truth: Class, predicted: Class) {
        self.counts[truth.index()][predicted.index()] += 1;
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        for i in 0..Class::COUNT {
            for j in 0..Class::COUNT {
                self.counts[i][j] += other.counts[i][j];
            }
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..Class::COUNT).map(|i| self.counts[i][i]).sum()
    }

    /// Fraction of examples on the diagonal; 0 for an empty matrix.
    pub fn accuracy(&self) -> f64 {
        let t = self.total();
        if t == 0 {
            0.0
        } else {
            self.correct() as f64 / t as f64
        }
    }

    pub fn binary(&self, class: Class) -> BinaryCounts {
        let k = class.index();
        let tp = self.counts[k][k];
        let fn_ = self.counts[k].iter().sum::<u64>() - tp;
        let fp = (0..Class::COUNT).map(|i| self.counts[i][k]).sum::<u64>() - tp;
        BinaryCounts {
            tp,
            fn_,
            fp,
            tn: self.total() - tp - fn_ - fp,
        }
    }

    pub fn class_metrics(&self, class: Class) -> Metrics {
        metrics(self.binary(class))
    }
}

/// Metrics of one class; ratios with a zero denominator are reported as 0
/// and listed in `undefined`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// `(TP + TN) / (TP + FP + TN + FN)`
    pub accuracy: f64,
    /// `TP / (TP + FP)`
    pub precision: f64,
    /// `TP / (TP + FN)`
    pub recall: f64,
    /// `TN / (TN + FP)`
    pub specificity: f64,
    /// Harmonic mean of precision and recall.
    pub f1: f64,
    pub undefined: Vec<String>,
}

pub fn metrics(c: BinaryCounts) -> Metrics {
    let mut undefined = Vec::new();
    let mut ratio = |name: &str, num: u64, den: u64| {
        if den == 0 {
            undefined.push(name.to_string());
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let accuracy = ratio("accuracy", c.tp + c.tn, c.tp + c.tn + c.fp + c.fn_);
    let precision = ratio("precision", c.tp, c.tp + c.fp);
    let recall = ratio("recall", c.tp, c.tp + c.fn_);
    let specificity = ratio("specificity", c.tn, c.tn + c.fp);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        undefined.push("f1".into());
        0.0
    };
    Metrics {
        accuracy,
        precision,
        recall,
        specificity,
        f1,
        undefined,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_computed() {
        let m = metrics(BinaryCounts { tp: 90, tn: 5, fp: 3, fn_: 2 });
        assert_eq!(m.accuracy, 0.95);
        assert_eq!(m.precision, 90.0 / 93.0);
        assert_eq!(m.recall, 90.0 / 92.0);
        assert_eq!(m.specificity, 5.0 / 8.0);
        let p = metrics(BinaryCounts { tp: 5, tn: 5, fp: 0, fn_: 0 });
        assert_eq!((p.accuracy, p.precision, p.recall, p.f1), (1.0, 1.0, 1.0, 1.0));
        assert!(p.undefined.is_empty());
    }

    #[test]
    fn zero_denominators_flagged() {
        let m = metrics(BinaryCounts { tp: 0, tn: 4, fp: 0, fn_: 3 });
        assert_eq!(m.precision, 0.0);
        assert!(m.undefined.contains(&"precision".to_string()));
        assert!(m.undefined.contains(&"f1".to_string()));
    }

    #[test]
    fn one_vs_rest_collapse() {
        let mut c = ConfusionMatrix::default();
        c.add(Class::Actuation, Class::Actuation);
        c.add(Class::Actuation, Class::Noise);
        c.add(Class::Noise, Class::Actuation);
        c.add(Class::Inhalation, Class::Inhalation);
        let b = c.binary(Class::Actuation);
        assert_eq!(b, BinaryCounts { tp: 1, tn: 1, fp: 1, fn_: 1 });
        assert_eq!(c.total(), 4);
        assert_eq!(c.accuracy(), 0.5);
    }
}
