use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::matrix::{FeatureMatrix, FeatureMeta};
use super::mel::{Mfcc, MfccConfig};
use super::spectral::{centroid_and_bandwidth, cepstrum, magnitude_spectrum, one_sided_len, psd};
use super::time::{harmonic_feature, lpc, volume, zero_crossing_rate};
use super::wavelet::{cwt_morlet, effective_cut, frequency_to_scale, high_band_power, wavelet_variance};
use crate::audio_io::AudioClip;
use crate::class::Class;
use crate::error::{Error, Result};
use crate::framing::{frame_geometry, frame_samples, frame_signal, hamming_window, remove_dc, FrameSeries};

/// Feature families the extractor can produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    /// RMS amplitude.
    Volume,
    /// Zero-crossing rate.
    Zcr,
    /// Hamming-windowed DFT magnitude, `N/2 + 1` bins.
    Spect,
    /// Leading coefficients of the Hamming-windowed real cepstrum.
    Cepst,
    Mfcc,
    /// Periodogram, `N/2 + 1` bins.
    Psd,
    /// Wavelet variance over a log-spaced scale grid.
    Cwt,
    Lpc,
    /// Volume, zero-crossing rate and the harmonic feature.
    Time,
    /// The 30-feature vector of the QDA recognizer.
    Qda30,
}

impl FeatureKind {
    pub const ALL: [FeatureKind; 10] = [
        FeatureKind::Volume,
        FeatureKind::Zcr,
        FeatureKind::Spect,
        FeatureKind::Cepst,
        FeatureKind::Mfcc,
        FeatureKind::Psd,
        FeatureKind::Cwt,
        FeatureKind::Lpc,
        FeatureKind::Time,
        FeatureKind::Qda30,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FeatureKind::Volume => "volume",
            FeatureKind::Zcr => "zcr",
            FeatureKind::Spect => "spect",
            FeatureKind::Cepst => "cepst",
            FeatureKind::Mfcc => "mfcc",
            FeatureKind::Psd => "psd",
            FeatureKind::Cwt => "cwt",
            FeatureKind::Lpc => "lpc",
            FeatureKind::Time => "time",
            FeatureKind::Qda30 => "qda30",
        }
    }
}

impl std::fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for FeatureKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        FeatureKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown feature kind '{s}'")))
    }
}

/// Column order of the 30-feature vector.
pub const QDA30_NAMES: [&str; 30] = [
    "mfcc_0",
    "mfcc_1",
    "mfcc_2",
    "mfcc_3",
    "mfcc_4",
    "mfcc_5",
    "mfcc_6",
    "mfcc_7",
    "mfcc_8",
    "mfcc_9",
    "mfcc_10",
    "mfcc_11",
    "lpc_1",
    "lpc_2",
    "lpc_3",
    "lpc_4",
    "lpc_5",
    "lpc_6",
    "lpc_7",
    "lpc_8",
    "lpc_9",
    "lpc_10",
    "psd_total",
    "zcr",
    "high_band_power",
    "harmonic",
    "volume",
    "spectral_centroid",
    "spectral_bandwidth",
    "cepstral_peak",
];

/// Extraction parameters shared by all kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeatureConfig {
    pub frame_ms: f64,
    pub hop_ms: f64,
    pub remove_dc: bool,
    pub mfcc: MfccConfig,
    pub cepst_coeffs: usize,
    pub cepst_floor_db: f64,
    pub lpc_order: usize,
    pub omega0: f64,
    pub scales_per_decade: usize,
    /// Number of scales of the `cwt` kind, log-spaced from `cwt_f_lo` to
    /// `0.95 * Nyquist`.
    pub cwt_scales: usize,
    pub cwt_f_lo: f64,
    /// Lower edge of the high-band power feature; clamped to `0.95 * Nyquist`.
    pub high_band_hz: f64,
    pub harmonic_lo_hz: f64,
    pub harmonic_hi_hz: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            frame_ms: 40.0,
            hop_ms: 20.0,
            remove_dc: true,
            mfcc: MfccConfig::default(),
            cepst_coeffs: 13,
            cepst_floor_db: -100.0,
            lpc_order: 10,
            omega0: super::wavelet::DEFAULT_OMEGA0,
            scales_per_decade: 32,
            cwt_scales: 16,
            cwt_f_lo: 100.0,
            high_band_hz: 15_000.0,
            harmonic_lo_hz: 500.0,
            harmonic_hi_hz: 600.0,
        }
    }
}

/// A feature kind bound to a sample rate and frame geometry.
#[derive(Debug, Clone)]
pub struct FeatureExtractor {
    kind: FeatureKind,
    config: FeatureConfig,
    sample_rate: u32,
    frame_len: usize,
    hop: usize,
    window: Vec<f64>,
    mfcc: Option<Mfcc>,
    cwt_scales: Vec<f64>,
    names: Vec<String>,
    warnings: Vec<String>,
}

impl FeatureExtractor {
    pub fn new(kind: FeatureKind, sample_rate: u32, config: &FeatureConfig) -> Result<Self> {
        let (frame_len, hop) = frame_geometry(sample_rate, config.frame_ms, config.hop_ms)?;
        let mut warnings = Vec::new();
        let nyq = sample_rate as f64 / 2.0;

        let mfcc = match kind {
            FeatureKind::Mfcc | FeatureKind::Qda30 => {
                let mut cfg = config.mfcc;
                if kind == FeatureKind::Qda30 {
                    cfg.n_coeffs = 12;
                }
                if cfg.n_fft < frame_len {
                    cfg.n_fft = frame_len.next_power_of_two();
                    warnings.push(format!("n_fft raised to {} to cover {frame_len}-sample frames", cfg.n_fft));
                }
                if cfg.f_hi.is_some_and(|f| f > nyq) {
                    warnings.push(format!("mel upper edge clamped to Nyquist ({nyq} Hz)"));
                    cfg.f_hi = Some(nyq);
                }
                let m = Mfcc::new(frame_len, sample_rate, cfg)?;
                warnings.extend(m.filterbank().warnings.iter().cloned());
                Some(m)
            }
            _ => None,
        };
        if matches!(kind, FeatureKind::Lpc | FeatureKind::Qda30) {
            let order = if kind == FeatureKind::Qda30 { 10 } else { config.lpc_order };
            if order == 0 || order >= frame_len {
                return Err(Error::invalid(format!("LPC order {order} invalid for {frame_len}-sample frames")));
            }
        }
        if matches!(kind, FeatureKind::Time | FeatureKind::Qda30) {
            let (lo, hi) = (config.harmonic_lo_hz, config.harmonic_hi_hz);
            if !(lo > 0.0 && hi >= lo && 2.0 * hi < sample_rate as f64) {
                return Err(Error::invalid(format!("harmonic search band {lo}-{hi} Hz unusable at {sample_rate} Hz")));
            }
        }
        if kind == FeatureKind::Qda30 {
            let (cut, clamped) = effective_cut(sample_rate, config.high_band_hz);
            if clamped {
                warnings.push(format!(
                    "high-band cut {} Hz exceeds 0.95 x Nyquist; clamped to {cut} Hz",
                    config.high_band_hz
                ));
            }
        }
        if kind == FeatureKind::Cepst && (config.cepst_coeffs == 0 || config.cepst_coeffs > frame_len) {
            return Err(Error::invalid("cepst_coeffs must be in 1..=frame length"));
        }
        let cwt_scales = if kind == FeatureKind::Cwt {
            cwt_grid(sample_rate, config.cwt_f_lo, config.cwt_scales, config.omega0)?
        } else {
            Vec::new()
        };

        let names = feature_names(kind, frame_len, config, &cwt_scales, sample_rate, mfcc.as_ref());
        let window = hamming_window(frame_len)?;
        Ok(Self {
            kind,
            config: config.clone(),
            sample_rate,
            frame_len,
            hop,
            window,
            mfcc,
            cwt_scales,
            names,
            warnings,
        })
    }

    pub fn kind(&self) -> FeatureKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn frame_len(&self) -> usize {
        self.frame_len
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn config(&self) -> &FeatureConfig {
        &self.config
    }

    /// Non-fatal adjustments made while building the extractor.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn meta(&self) -> FeatureMeta {
        let (n_filters, n_coeffs) = match self.kind {
            FeatureKind::Mfcc => (self.config.mfcc.n_filters, self.config.mfcc.n_coeffs),
            FeatureKind::Qda30 => (self.config.mfcc.n_filters, 12),
            FeatureKind::Cepst => (0, self.config.cepst_coeffs),
            FeatureKind::Lpc => (0, self.config.lpc_order),
            _ => (0, 0),
        };
        FeatureMeta {
            sample_rate: self.sample_rate,
            frame_ms: self.config.frame_ms,
            hop_ms: self.config.hop_ms,
            frame_len: self.frame_len,
            hop: self.hop,
            n_filters,
            n_coeffs,
            scales: self.cwt_scales.clone(),
        }
    }

    /// Feature vector of one raw frame.
    pub fn row(&self, frame: &[f64]) -> Result<Vec<f64>> {
        if frame.len() != self.frame_len {
            return Err(Error::DimensionMismatch {
                expected: self.frame_len,
                got: frame.len(),
            });
        }
        let owned;
        let x: &[f64] = if self.config.remove_dc {
            owned = remove_dc(frame);
            &owned
        } else {
            frame
        };
        let c = &self.config;
        let fs = self.sample_rate;
        let out = match self.kind {
            FeatureKind::Volume => vec![volume(x)],
            FeatureKind::Zcr => vec![zero_crossing_rate(x)],
            FeatureKind::Spect => magnitude_spectrum(x, Some(&self.window)),
            FeatureKind::Psd => psd(x),
            FeatureKind::Cepst => {
                let mut cep = cepstrum(&self.windowed(x), c.cepst_floor_db);
                cep.truncate(c.cepst_coeffs);
                cep
            }
            FeatureKind::Mfcc => self.mfcc.as_ref().expect("mfcc plan").coefficients(x),
            FeatureKind::Cwt => wavelet_variance(&cwt_morlet(x, &self.cwt_scales, c.omega0)?),
            FeatureKind::Lpc => lpc(x, c.lpc_order)?.coeffs,
            FeatureKind::Time => vec![
                volume(x),
                zero_crossing_rate(x),
                harmonic_feature(x, fs, c.harmonic_lo_hz, c.harmonic_hi_hz),
            ],
            FeatureKind::Qda30 => self.qda30(x)?,
        };
        debug_assert_eq!(out.len(), self.dim());
        Ok(out)
    }

    fn windowed(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.window).map(|(a, b)| a * b).collect()
    }

    fn qda30(&self, x: &[f64]) -> Result<Vec<f64>> {
        let c = &self.config;
        let fs = self.sample_rate;
        let mut v = Vec::with_capacity(30);
        v.extend(self.mfcc.as_ref().expect("mfcc plan").coefficients(x));
        v.extend(lpc(x, 10)?.coeffs);
        v.push(psd(x).iter().sum());
        v.push(zero_crossing_rate(x));
        v.push(high_band_power(x, fs, c.high_band_hz, c.omega0, c.scales_per_decade));
        v.push(harmonic_feature(x, fs, c.harmonic_lo_hz, c.harmonic_hi_hz));
        v.push(volume(x));
        let mag = magnitude_spectrum(x, Some(&self.window));
        let (centroid, bandwidth) = centroid_and_bandwidth(&mag, fs, self.frame_len);
        v.push(centroid);
        v.push(bandwidth);
        let cep = cepstrum(&self.windowed(x), c.cepst_floor_db);
        let peak = cep[1..=self.frame_len / 2]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        v.push(if peak.is_finite() { peak } else { 0.0 });
        Ok(v)
    }

    /// Rows for every frame of `series`.
    pub fn matrix(&self, series: &FrameSeries, row_labels: Option<Vec<Class>>) -> Result<FeatureMatrix> {
        if series.frame_len != self.frame_len || series.sample_rate != self.sample_rate {
            return Err(Error::invalid(format!(
                "frame series ({} samples @ {} Hz) does not match extractor ({} @ {} Hz)",
                series.frame_len, series.sample_rate, self.frame_len, self.sample_rate
            )));
        }
        let mut data = Array2::zeros((series.n_frames(), self.dim()));
        for (i, frame) in series.frames.rows().into_iter().enumerate() {
            let row = self.row(frame.as_slice().expect("frames are contiguous"))?;
            data.row_mut(i).assign(&ndarray::ArrayView1::from(&row));
        }
        FeatureMatrix::new(data, self.kind, self.names.clone(), row_labels, self.meta())
    }

    /// Frames `clip` with the configured geometry and extracts every frame.
    pub fn extract_clip(&self, clip: &AudioClip) -> Result<(FrameSeries, FeatureMatrix)> {
        if clip.sample_rate() != self.sample_rate {
            return Err(Error::invalid(format!(
                "clip rate {} Hz does not match extractor rate {} Hz",
                clip.sample_rate(),
                self.sample_rate
            )));
        }
        let series = frame_signal(clip, self.config.frame_ms, self.config.hop_ms)?;
        let m = self.matrix(&series, None)?;
        Ok((series, m))
    }

    /// Frames a bare sample buffer (e.g. one annotated segment).
    pub fn extract_samples(&self, samples: &[f64], origin: &str) -> Result<FeatureMatrix> {
        let series = frame_samples(samples, self.sample_rate, self.frame_len, self.hop, origin)?;
        self.matrix(&series, None)
    }
}

fn cwt_grid(sample_rate: u32, f_lo: f64, n: usize, omega0: f64) -> Result<Vec<f64>> {
    let f_hi = 0.95 * sample_rate as f64 / 2.0;
    if n == 0 || !(f_lo > 0.0 && f_lo < f_hi) {
        return Err(Error::invalid(format!(
            "cwt grid needs >= 1 scale and 0 < f_lo < {f_hi} Hz"
        )));
    }
    let freqs: Vec<f64> = if n == 1 {
        vec![f_hi]
    } else {
        (0..n)
            .map(|i| f_hi * (f_lo / f_hi).powf(i as f64 / (n - 1) as f64))
            .collect()
    };
    Ok(freqs.into_iter().map(|f| frequency_to_scale(f, sample_rate, omega0)).collect())
}

fn feature_names(
    kind: FeatureKind,
    frame_len: usize,
    config: &FeatureConfig,
    cwt_scales: &[f64],
    sample_rate: u32,
    mfcc: Option<&Mfcc>,
) -> Vec<String> {
    let indexed = |prefix: &str, range: std::ops::Range<usize>| range.map(|i| format!("{prefix}_{i}")).collect();
    match kind {
        FeatureKind::Volume => vec!["volume".into()],
        FeatureKind::Zcr => vec!["zcr".into()],
        FeatureKind::Spect => indexed("spect", 0..one_sided_len(frame_len)),
        FeatureKind::Psd => indexed("psd", 0..one_sided_len(frame_len)),
        FeatureKind::Cepst => indexed("cepst", 0..config.cepst_coeffs),
        FeatureKind::Mfcc => indexed("mfcc", 0..mfcc.map_or(0, |m| m.n_coeffs())),
        FeatureKind::Lpc => indexed("lpc", 1..config.lpc_order + 1),
        FeatureKind::Cwt => cwt_scales
            .iter()
            .map(|&a| format!("cwt_{:.0}hz", super::wavelet::scale_to_frequency(a, sample_rate, config.omega0)))
            .collect(),
        FeatureKind::Time => vec!["volume".into(), "zcr".into(), "harmonic".into()],
        FeatureKind::Qda30 => QDA30_NAMES.iter().map(|s| s.to_string()).collect(),
    }
}

/// Spectrogram of a frame series: per-frame DFT magnitude over the first
/// `N/2 + 1` bins, Hamming-weighted when `windowed`.
pub fn spectrogram(series: &FrameSeries, windowed: bool) -> Result<FeatureMatrix> {
    let n = series.frame_len;
    let window = hamming_window(n)?;
    let bins = one_sided_len(n);
    let mut data = Array2::zeros((series.n_frames(), bins));
    for (i, frame) in series.frames.rows().into_iter().enumerate() {
        let f = frame.to_vec();
        let mag = magnitude_spectrum(&f, windowed.then_some(window.as_slice()));
        data.row_mut(i).assign(&ndarray::ArrayView1::from(&mag));
    }
    let fs = series.sample_rate;
    let meta = FeatureMeta {
        sample_rate: fs,
        frame_ms: n as f64 * 1000.0 / fs as f64,
        hop_ms: series.hop as f64 * 1000.0 / fs as f64,
        frame_len: n,
        hop: series.hop,
        n_filters: 0,
        n_coeffs: 0,
        scales: Vec::new(),
    };
    let names = (0..bins).map(|k| format!("spect_{k}")).collect();
    FeatureMatrix::new(data, FeatureKind::Spect, names, None, meta)
}
