//! Time-domain descriptors.

use crate::error::{Error, Result};

/// Root-mean-square amplitude, `sqrt(mean(x^2))`.
pub fn volume(frame: &[f64]) -> f64 {
    if frame.is_empty() {
        return 0.0;
    }
    (frame.iter().map(|x| x * x).sum::<f64>() / frame.len() as f64).sqrt()
}

/// Fraction of adjacent pairs whose product is strictly negative.
/// A sample exactly at zero never counts as a crossing.
pub fn zero_crossing_rate(frame: &[f64]) -> f64 {
    if frame.len() < 2 {
        return 0.0;
    }
    let crossings = frame.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
    crossings as f64 / (frame.len() - 1) as f64
}

/// Linear-prediction fit `x(t) ~ sum_i a_i x(t - i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lpc {
    pub coeffs: Vec<f64>,
    /// Prediction error power after each recursion level, starting with `r(0)`.
    pub errors: Vec<f64>,
    /// Set when the frame has zero energy; coefficients are then all zero.
    pub degenerate: bool,
}

/// Levinson-Durbin recursion on the biased autocorrelation.
pub fn lpc(frame: &[f64], order: usize) -> Result<Lpc> {
    if frame.len() <= order {
        return Err(Error::invalid(format!(
            "LPC order {order} needs more than {order} samples, got {}",
            frame.len()
        )));
    }
    let n = frame.len();
    let r: Vec<f64> = (0..=order)
        .map(|k| frame[k..].iter().zip(frame).map(|(a, b)| a * b).sum::<f64>() / n as f64)
        .collect();
    if r[0] <= 0.0 {
        return Ok(Lpc {
            coeffs: vec![0.0; order],
            errors: vec![0.0],
            degenerate: true,
        });
    }
    let mut a = vec![0.0; order + 1];
    let mut err = r[0];
    let mut errors = vec![err];
    for i in 1..=order {
        let acc = r[i] - (1..i).map(|j| a[j] * r[i - j]).sum::<f64>();
        let k = acc / err;
        let prev = a.clone();
        for j in 1..i {
            a[j] = prev[j] - k * prev[i - j];
        }
        a[i] = k;
        err *= 1.0 - k * k;
        errors.push(err);
        if err <= 0.0 {
            // perfectly predictable; higher orders add nothing
            break;
        }
    }
    Ok(Lpc {
        coeffs: a[1..].to_vec(),
        errors,
        degenerate: false,
    })
}

/// Peak normalized autocorrelation over lags `fs/f_hi ..= fs/f_lo`.
///
/// Each lag is normalized by the energies of the two overlapping parts, so a
/// pure tone scores `cos(2 pi f lag / fs)` regardless of frame length.
pub fn harmonic_feature(frame: &[f64], sample_rate: u32, f_lo: f64, f_hi: f64) -> f64 {
    let fs = sample_rate as f64;
    let lo_lag = (fs / f_hi).floor().max(1.0) as usize;
    let hi_lag = ((fs / f_lo).ceil() as usize).min(frame.len().saturating_sub(1));
    let mut best = 0.0f64;
    for lag in lo_lag..=hi_lag {
        let (a, b) = (&frame[..frame.len() - lag], &frame[lag..]);
        let ea: f64 = a.iter().map(|x| x * x).sum();
        let eb: f64 = b.iter().map(|x| x * x).sum();
        if ea <= 0.0 || eb <= 0.0 {
            continue;
        }
        let c: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        best = best.max(c / (ea * eb).sqrt());
    }
    best
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    use super::*;

    fn noise(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn volume_examples() {
        assert_eq!(volume(&[-0.5; 10]), 0.5);
        assert!((volume(&[3.0, -4.0]) - 12.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(volume(&[0.0; 4]), 0.0);
    }

    #[test]
    fn zcr_examples() {
        assert_eq!(zero_crossing_rate(&[1.0, -1.0, 1.0, -1.0]), 1.0);
        assert_eq!(zero_crossing_rate(&[2.0, 2.0, 2.0]), 0.0);
        assert_eq!(zero_crossing_rate(&[1.0, 0.0, -1.0]), 0.0);
    }

    #[test]
    fn lpc_recovers_ar1() {
        let e = noise(20_000, 1);
        let mut x = vec![0.0; e.len()];
        for t in 1..x.len() {
            x[t] = 0.9 * x[t - 1] + e[t];
        }
        let fit = lpc(&x, 10).unwrap();
        assert!((fit.coeffs[0] - 0.9).abs() < 0.05, "{:?}", fit.coeffs);
        assert!(fit.errors.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn lpc_white_noise_near_zero() {
        let fit = lpc(&noise(10_000, 2), 10).unwrap();
        assert!(fit.coeffs.iter().all(|a| a.abs() < 0.2), "{:?}", fit.coeffs);
    }

    #[test]
    fn lpc_zero_frame_flagged() {
        let fit = lpc(&[0.0; 64], 10).unwrap();
        assert!(fit.degenerate);
        assert_eq!(fit.coeffs, vec![0.0; 10]);
        assert!(lpc(&[1.0; 10], 10).is_err());
    }

    #[test]
    fn harmonic_examples() {
        let tone: Vec<f64> = (0..320).map(|i| (2.0 * PI * 550.0 * i as f64 / 8000.0).sin()).collect();
        assert!(harmonic_feature(&tone, 8000, 500.0, 600.0) >= 0.95);
        assert!(harmonic_feature(&noise(320, 5), 8000, 500.0, 600.0) < 0.5);
        assert_eq!(harmonic_feature(&[0.0; 320], 8000, 500.0, 600.0), 0.0);
    }
}
