//! Mel filterbank, orthonormal DCT-II and the MFCC pipeline.

use ndarray::Array2;
use num_complex::Complex64;

use super::spectral::{fft_in_place, power_floor};
use crate::error::{Error, Result};
use crate::framing::hamming_window;

pub fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

pub fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Triangular filters on one-sided FFT bins.
#[derive(Debug, Clone, PartialEq)]
pub struct MelFilterbank {
    /// `n_filters x (n_fft/2 + 1)`
    pub weights: Array2<f64>,
    /// Mel-spaced center frequencies in Hz, strictly increasing.
    pub center_hz: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Builds `n_filters` triangles equally spaced in mel between `f_lo` and
/// `f_hi`. Edges are snapped to FFT bins and nudged apart so no triangle
/// collapses; each filter peaks at exactly 1 on its center bin.
pub fn mel_filterbank(
    n_filters: usize,
    n_fft: usize,
    sample_rate: u32,
    f_lo: f64,
    f_hi: f64,
) -> Result<MelFilterbank> {
    if n_filters < 2 {
        return Err(Error::invalid("mel filterbank needs at least 2 filters"));
    }
    if n_fft < 2 {
        return Err(Error::invalid("n_fft must be at least 2"));
    }
    let nyquist = sample_rate as f64 / 2.0;
    let mut warnings = Vec::new();
    let f_hi = if f_hi > nyquist {
        warnings.push(format!("upper band edge {f_hi} Hz clamped to Nyquist {nyquist} Hz"));
        nyquist
    } else {
        f_hi
    };
    if !(f_lo >= 0.0 && f_lo < f_hi) {
        return Err(Error::invalid(format!("need 0 <= f_lo < f_hi, got {f_lo}..{f_hi}")));
    }

    let n_bins = n_fft / 2 + 1;
    let (m_lo, m_hi) = (hz_to_mel(f_lo), hz_to_mel(f_hi));
    let edges_hz: Vec<f64> = (0..n_filters + 2)
        .map(|i| mel_to_hz(m_lo + (m_hi - m_lo) * i as f64 / (n_filters + 1) as f64))
        .collect();
    let mut bins: Vec<usize> = edges_hz
        .iter()
        .map(|f| (((n_fft + 1) as f64 * f / sample_rate as f64).floor() as usize).min(n_bins - 1))
        .collect();
    for i in 1..bins.len() {
        if bins[i] <= bins[i - 1] {
            bins[i] = bins[i - 1] + 1;
        }
    }
    if *bins.last().unwrap() >= n_bins {
        return Err(Error::invalid(format!(
            "{n_filters} filters do not fit in {n_bins} FFT bins"
        )));
    }

    let mut weights = Array2::zeros((n_filters, n_bins));
    for m in 0..n_filters {
        let (l, c, r) = (bins[m], bins[m + 1], bins[m + 2]);
        for k in l..=c {
            weights[[m, k]] = (k - l) as f64 / (c - l) as f64;
        }
        for k in c..=r {
            weights[[m, k]] = (r - k) as f64 / (r - c) as f64;
        }
    }
    Ok(MelFilterbank {
        weights,
        center_hz: edges_hz[1..=n_filters].to_vec(),
        warnings,
    })
}

/// Orthonormal DCT-II.
pub fn dct2_ortho(x: &[f64]) -> Vec<f64> {
    let m = x.len();
    if m == 0 {
        return Vec::new();
    }
    let mf = m as f64;
    (0..m)
        .map(|k| {
            let scale = if k == 0 { (1.0 / mf).sqrt() } else { (2.0 / mf).sqrt() };
            scale
                * x.iter()
                    .enumerate()
                    .map(|(n, v)| v * (std::f64::consts::PI * k as f64 * (2 * n + 1) as f64 / (2.0 * mf)).cos())
                    .sum::<f64>()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MfccConfig {
    pub n_filters: usize,
    pub n_coeffs: usize,
    pub n_fft: usize,
    pub f_lo: f64,
    /// `None` means Nyquist.
    pub f_hi: Option<f64>,
    pub floor_db: f64,
}

impl Default for MfccConfig {
    fn default() -> Self {
        Self {
            n_filters: 26,
            n_coeffs: 13,
            n_fft: 512,
            f_lo: 0.0,
            f_hi: None,
            floor_db: -100.0,
        }
    }
}

/// Precomputed MFCC pipeline for a fixed frame length:
/// Hamming, zero-padded DFT, periodogram `|X|^2/N`, mel energies, floored
/// log, orthonormal DCT-II, first `n_coeffs`.
#[derive(Debug, Clone)]
pub struct Mfcc {
    window: Vec<f64>,
    bank: MelFilterbank,
    config: MfccConfig,
    frame_len: usize,
}

impl Mfcc {
    pub fn new(frame_len: usize, sample_rate: u32, config: MfccConfig) -> Result<Self> {
        if config.n_fft < frame_len {
            return Err(Error::invalid(format!(
                "n_fft ({}) must be at least the frame length ({frame_len})",
                config.n_fft
            )));
        }
        if config.n_coeffs == 0 || config.n_coeffs > config.n_filters {
            return Err(Error::invalid("need 1 <= n_coeffs <= n_filters"));
        }
        let f_hi = config.f_hi.unwrap_or(sample_rate as f64 / 2.0);
        let bank = mel_filterbank(config.n_filters, config.n_fft, sample_rate, config.f_lo, f_hi)?;
        Ok(Self {
            window: hamming_window(frame_len)?,
            bank,
            config,
            frame_len,
        })
    }

    pub fn n_coeffs(&self) -> usize {
        self.config.n_coeffs
    }

    pub fn filterbank(&self) -> &MelFilterbank {
        &self.bank
    }

    /// Log mel energies of one frame (before the DCT).
    pub fn log_mel(&self, frame: &[f64]) -> Vec<f64> {
        assert_eq!(frame.len(), self.frame_len, "frame length changed");
        let mut buf = vec![Complex64::new(0.0, 0.0); self.config.n_fft];
        for (i, (x, w)) in frame.iter().zip(&self.window).enumerate() {
            buf[i].re = x * w;
        }
        fft_in_place(&mut buf, false);
        let n = self.frame_len as f64;
        let power: Vec<f64> = buf[..self.bank.weights.ncols()]
            .iter()
            .map(|c| c.norm_sqr() / n)
            .collect();
        let floor = power_floor(self.config.floor_db);
        self.bank
            .weights
            .rows()
            .into_iter()
            .map(|row| row.iter().zip(&power).map(|(w, p)| w * p).sum::<f64>().max(floor).ln())
            .collect()
    }

    pub fn coefficients(&self, frame: &[f64]) -> Vec<f64> {
        let mut c = dct2_ortho(&self.log_mel(frame));
        c.truncate(self.config.n_coeffs);
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mel_round_trip() {
        for f in [0.0, 100.0, 1000.0, 3999.0] {
            assert!((mel_to_hz(hz_to_mel(f)) - f).abs() < 1e-9);
        }
        assert!((hz_to_mel(1000.0) - 999.9855).abs() < 1e-3);
    }

    #[test]
    fn filterbank_shape_and_triangles() {
        let fb = mel_filterbank(26, 512, 8000, 0.0, 4000.0).unwrap();
        assert_eq!(fb.weights.dim(), (26, 257));
        for row in fb.weights.rows() {
            assert!(row.sum() > 0.0);
            assert!(row.iter().all(|&w| w >= 0.0));
            assert_eq!(row.iter().cloned().fold(0.0, f64::max), 1.0);
        }
        assert!(fb.center_hz.windows(2).all(|w| w[1] > w[0]));
        // adjacent filters share support
        for m in 0..25 {
            let overlap = fb.weights.row(m).iter().zip(fb.weights.row(m + 1)).any(|(a, b)| *a > 0.0 && *b > 0.0);
            let touching = fb.weights.row(m).iter().rposition(|&w| w > 0.0) >= fb.weights.row(m + 1).iter().position(|&w| w > 0.0);
            assert!(overlap || touching);
        }
    }

    #[test]
    fn filterbank_clamps_and_rejects() {
        let fb = mel_filterbank(10, 256, 8000, 0.0, 6000.0).unwrap();
        assert_eq!(fb.warnings.len(), 1);
        assert!(mel_filterbank(1, 256, 8000, 0.0, 4000.0).is_err());
        assert!(mel_filterbank(10, 256, 8000, 3000.0, 2000.0).is_err());
    }

    #[test]
    fn dct_of_constant_is_first_coefficient() {
        let c = dct2_ortho(&[2.0; 8]);
        assert!((c[0] - 2.0 * 8f64.sqrt()).abs() < 1e-12);
        assert!(c[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn dct_is_orthonormal() {
        let x: Vec<f64> = (0..13).map(|i| (i as f64 * 1.3).cos()).collect();
        let c = dct2_ortho(&x);
        let e1: f64 = x.iter().map(|v| v * v).sum();
        let e2: f64 = c.iter().map(|v| v * v).sum();
        assert!((e1 - e2).abs() < 1e-12);
    }

    #[test]
    fn zero_frame_gives_floor_constant() {
        let m = Mfcc::new(320, 8000, MfccConfig::default()).unwrap();
        let c = m.coefficients(&[0.0; 320]);
        assert_eq!(c.len(), 13);
        assert!((c[0] - 1e-10f64.ln() * 26f64.sqrt()).abs() < 1e-9);
        assert!(c[1..].iter().all(|v| v.abs() < 1e-9));
    }
}
