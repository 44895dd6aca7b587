//! Per-segment wall-clock cost of feature extraction and classification.

use std::time::Instant;

use ndarray::{ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use super::evaluate::Predictor;
use crate::error::{Error, Result};
use crate::features::FeatureExtractor;

/// Median seconds per segment (one raw frame) for each stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub feature_s: f64,
    pub classify_s: f64,
    pub samples: usize,
}

impl StageTiming {
    pub fn sum_s(&self) -> f64 {
        self.feature_s + self.classify_s
    }
}

/// Times `extractor` then `model` on raw frames, cycling through `frames`
/// until `min_samples` measurements exist. A short warm-up pass is discarded.
pub fn time_benchmark<M: Predictor>(
    extractor: &FeatureExtractor,
    model: &M,
    frames: ArrayView2<'_, f64>,
    min_samples: usize,
) -> Result<StageTiming> {
    if frames.nrows() == 0 || min_samples == 0 {
        return Err(Error::invalid("timing needs at least one frame and one sample"));
    }
    let n = min_samples.max(frames.nrows().min(1000));
    let frame = |i: usize| frames.row(i % frames.nrows()).to_vec();
    for i in 0..n.min(10) {
        let row = extractor.row(&frame(i))?;
        model.predict_row(ArrayView1::from(&row))?;
    }
    let mut feat = Vec::with_capacity(n);
    let mut cls = Vec::with_capacity(n);
    for i in 0..n {
        let f = frame(i);
        let t0 = Instant::now();
        let row = extractor.row(&f)?;
        let t1 = Instant::now();
        std::hint::black_box(model.predict_row(ArrayView1::from(&row))?);
        let t2 = Instant::now();
        feat.push((t1 - t0).as_secs_f64());
        cls.push((t2 - t1).as_secs_f64());
    }
    Ok(StageTiming {
        feature_s: median(&mut feat),
        classify_s: median(&mut cls),
        samples: n,
    })
}

pub fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&mut []).is_nan());
    }
}
