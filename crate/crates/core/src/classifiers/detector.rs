//! Drug-actuation detection from high-band wavelet power.
//!
//! The scale-summed Morlet power `P(t) = sum_a |W(a, t)|^2` over a high
//! frequency band is smoothed with a centered box of `2 * lookaround`,
//! normalized by its global maximum, and scanned for regions above
//! `theta1`. Each region's peak is placed at the center of its plateau
//! (samples within `plateau` of the region maximum) and accepted when the
//! power `lookaround` before and after has fallen to at most
//! `(1 - theta2)` of the peak. Accepted events closer than `merge_ms` are
//! merged.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::wavelet::{cwt_morlet, log_scale_grid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectorConfig {
    pub theta1: f64,
    pub theta2: f64,
    pub lookaround_ms: f64,
    pub omega0: f64,
    /// Lower edge of the analysed band; the upper edge is `0.95 * Nyquist`.
    pub band_lo_hz: f64,
    pub scales_per_decade: usize,
    pub merge_ms: f64,
    /// Fraction of a region's maximum that still counts as its plateau.
    pub plateau: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            theta1: 0.38,
            theta2: 0.25,
            lookaround_ms: 56.0,
            omega0: 20.0,
            band_lo_hz: 2000.0,
            scales_per_decade: 32,
            merge_ms: 100.0,
            plateau: 0.95,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActuationEvent {
    /// Seconds from the start of the signal.
    pub time: f64,
    /// Normalized smoothed power at the event, in `(theta1, 1]`.
    pub peak: f64,
}

/// Smoothed, max-normalized high-band power of `signal`. All zeros for a
/// silent signal.
pub fn actuation_power(signal: &[f64], sample_rate: u32, cfg: &DetectorConfig) -> Result<Vec<f64>> {
    let nyq = sample_rate as f64 / 2.0;
    let top = 0.95 * nyq;
    let lo = cfg.band_lo_hz.min(top);
    let scales = log_scale_grid(sample_rate, lo, top, cfg.omega0, cfg.scales_per_decade.max(1));
    let mut scales = scales;
    scales.sort_by(f64::total_cmp);
    let sc = cwt_morlet(signal, &scales, cfg.omega0)?;
    let n = signal.len();
    let mut power = vec![0.0; n];
    for row in sc.coefficients.rows() {
        for (p, c) in power.iter_mut().zip(row.iter()) {
            *p += c.norm_sqr();
        }
    }
    let half = ((cfg.lookaround_ms * sample_rate as f64 / 1000.0).round() as usize).max(1);
    let smoothed = box_smooth(&power, half);
    let max = smoothed.iter().copied().fold(0.0, f64::max);
    Ok(if max > 0.0 {
        smoothed.iter().map(|p| p / max).collect()
    } else {
        vec![0.0; n]
    })
}

/// Centered moving average over `[t - half, t + half)`, truncated at the
/// edges.
fn box_smooth(x: &[f64], half: usize) -> Vec<f64> {
    let n = x.len();
    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + x[i];
    }
    (0..n)
        .map(|t| {
            let a = t.saturating_sub(half);
            let b = (t + half).min(n);
            (prefix[b] - prefix[a]) / (b - a) as f64
        })
        .collect()
}

/// Detects actuation events in a mono signal.
pub fn detect_actuation_cwt(signal: &[f64], sample_rate: u32, cfg: &DetectorConfig) -> Result<Vec<ActuationEvent>> {
    if !(cfg.theta1 > 0.0 && cfg.theta1 < 1.0) || !(cfg.theta2 > 0.0 && cfg.theta2 < 1.0) {
        return Err(Error::invalid("detector thresholds must lie in (0, 1)"));
    }
    let look = (cfg.lookaround_ms * sample_rate as f64 / 1000.0).round() as usize;
    if look == 0 || signal.len() < 2 * look {
        return Err(Error::invalid(format!(
            "signal of {} samples is shorter than twice the {} ms look-around",
            signal.len(),
            cfg.lookaround_ms
        )));
    }
    let p = actuation_power(signal, sample_rate, cfg)?;
    let n = p.len();
    let fs = sample_rate as f64;
    let mut events = Vec::new();
    let mut t = 0;
    while t < n {
        if p[t] <= cfg.theta1 {
            t += 1;
            continue;
        }
        let start = t;
        while t < n && p[t] > cfg.theta1 {
            t += 1;
        }
        let region = &p[start..t];
        let peak = region.iter().copied().fold(0.0, f64::max);
        let first = region.iter().position(|&v| v >= cfg.plateau * peak).expect("peak is in region");
        let last = region.iter().rposition(|&v| v >= cfg.plateau * peak).expect("peak is in region");
        let c = start + (first + last) / 2;
        let before = p[c.saturating_sub(look)];
        let after = p[(c + look).min(n - 1)];
        let limit = (1.0 - cfg.theta2) * peak;
        if before <= limit && after <= limit {
            events.push(ActuationEvent { time: c as f64 / fs, peak });
        }
    }
    Ok(merge_events(events, cfg.merge_ms / 1000.0))
}

/// Merges time-sorted events closer than `min_gap` seconds, keeping the
/// stronger of each merged pair (the earlier one on equal peaks).
pub fn merge_events(mut events: Vec<ActuationEvent>, min_gap: f64) -> Vec<ActuationEvent> {
    events.sort_by(|a, b| a.time.total_cmp(&b.time));
    let mut out: Vec<ActuationEvent> = Vec::with_capacity(events.len());
    for e in events {
        match out.last_mut() {
            Some(last) if e.time - last.time < min_gap => {
                if e.peak > last.peak {
                    *last = e;
                }
            }
            _ => out.push(e),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn burst_clip(at: f64, dur: f64, seed: u64) -> Vec<f64> {
        let fs = 8000.0;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, 1.0).unwrap();
        let n = (2.0 * fs) as usize;
        let mut x: Vec<f64> = (0..n)
            .map(|i| 0.05 * (2.0 * std::f64::consts::PI * 600.0 * i as f64 / fs).sin() + 0.005 * noise.sample(&mut rng))
            .collect();
        let (a, b) = (((at - dur / 2.0) * fs) as usize, ((at + dur / 2.0) * fs) as usize);
        for (i, v) in x[a..b].iter_mut().enumerate() {
            *v += 0.3 * (2.0 * std::f64::consts::PI * 3000.0 * i as f64 / fs).sin() * (1.0 + 0.2 * noise.sample(&mut rng));
        }
        x
    }

    #[test]
    fn silence_has_no_events() {
        let ev = detect_actuation_cwt(&vec![0.0; 8000], 8000, &DetectorConfig::default()).unwrap();
        assert!(ev.is_empty());
    }

    #[test]
    fn single_burst_found() {
        for (dur, seed) in [(0.10, 1), (0.12, 2), (0.15, 3)] {
            let ev = detect_actuation_cwt(&burst_clip(1.0, dur, seed), 8000, &DetectorConfig::default()).unwrap();
            assert_eq!(ev.len(), 1, "{dur}: {ev:?}");
            assert!((ev[0].time - 1.0).abs() <= 0.03, "{ev:?}");
        }
    }

    #[test]
    fn too_short_signal() {
        assert!(detect_actuation_cwt(&[0.0; 100], 8000, &DetectorConfig::default()).is_err());
    }

    #[test]
    fn close_events_merge() {
        let e = |time, peak| ActuationEvent { time, peak };
        let merged = merge_events(vec![e(1.05, 0.6), e(1.0, 0.9), e(1.5, 0.5)], 0.1);
        assert_eq!(merged, vec![e(1.0, 0.9), e(1.5, 0.5)]);
        assert_eq!(merge_events(vec![e(0.2, 0.5), e(0.35, 0.7)], 0.1).len(), 2);
    }
}
