//! Framing: overlapping analysis frames, DC removal, the Hamming window and
//! center-labeled sliding windows over per-frame features.

use std::f64::consts::PI;

use ndarray::{s, Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::audio_io::AudioClip;
use crate::class::Class;
use crate::error::{Error, Result};

/// Overlapping frames cut from one clip.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSeries {
    /// `n_frames x frame_len`
    pub frames: Array2<f64>,
    pub frame_len: usize,
    pub hop: usize,
    pub sample_rate: u32,
    pub origin_clip: String,
    /// Center time of each frame, seconds from clip start.
    pub frame_times: Vec<f64>,
}

impl FrameSeries {
    pub fn n_frames(&self) -> usize {
        self.frames.nrows()
    }
}

/// Frame length and hop in samples for the given durations.
pub fn frame_geometry(sample_rate: u32, frame_ms: f64, hop_ms: f64) -> Result<(usize, usize)> {
    let n = (frame_ms * sample_rate as f64 / 1000.0).round() as usize;
    let hop = (hop_ms * sample_rate as f64 / 1000.0).round() as usize;
    if n == 0 || hop == 0 || hop > n {
        return Err(Error::invalid(format!(
            "need 0 < hop <= frame length, got frame {n} / hop {hop} samples"
        )));
    }
    Ok((n, hop))
}

/// Splits a clip into `frame_ms` frames every `hop_ms`. A trailing remainder
/// shorter than one frame is dropped.
pub fn frame_signal(clip: &AudioClip, frame_ms: f64, hop_ms: f64) -> Result<FrameSeries> {
    let (n, hop) = frame_geometry(clip.sample_rate(), frame_ms, hop_ms)?;
    frame_samples(clip.samples(), clip.sample_rate(), n, hop, &clip.clip_id)
}

/// [`frame_signal`] with explicit sample counts.
pub fn frame_samples(
    samples: &[f64],
    sample_rate: u32,
    frame_len: usize,
    hop: usize,
    origin_clip: &str,
) -> Result<FrameSeries> {
    if frame_len == 0 || hop == 0 || hop > frame_len {
        return Err(Error::invalid("need 0 < hop <= frame length"));
    }
    if samples.len() < frame_len {
        return Err(Error::invalid(format!(
            "clip of {} samples is shorter than one frame ({frame_len})",
            samples.len()
        )));
    }
    let n_frames = (samples.len() - frame_len) / hop + 1;
    let mut frames = Array2::zeros((n_frames, frame_len));
    for (k, mut row) in frames.axis_iter_mut(Axis(0)).enumerate() {
        let start = k * hop;
        row.assign(&ndarray::ArrayView1::from(&samples[start..start + frame_len]));
    }
    let fs = sample_rate as f64;
    let frame_times = (0..n_frames)
        .map(|k| (k * hop) as f64 / fs + frame_len as f64 / (2.0 * fs))
        .collect();
    Ok(FrameSeries {
        frames,
        frame_len,
        hop,
        sample_rate,
        origin_clip: origin_clip.to_string(),
        frame_times,
    })
}

/// Subtracts the frame mean.
pub fn remove_dc(frame: &[f64]) -> Vec<f64> {
    let mut out = frame.to_vec();
    remove_dc_in_place(&mut out);
    out
}

pub fn remove_dc_in_place(frame: &mut [f64]) {
    if frame.is_empty() {
        return;
    }
    let mean = frame.iter().sum::<f64>() / frame.len() as f64;
    frame.iter_mut().for_each(|x| *x -= mean);
}

/// Symmetric Hamming window `0.54 - 0.46 cos(2 pi n / (N - 1))`, `n = 0..N`.
pub fn hamming_window(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::invalid("Hamming window needs N >= 2"));
    }
    let m = (n - 1) as f64;
    Ok((0..n)
        .map(|i| 0.54 - 0.46 * (2.0 * PI * i as f64 / m).cos())
        .collect())
}

/// How test examples are cut relative to annotation boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mixing {
    /// Every window is kept and labeled by its center frame.
    Mixed,
    /// Only windows whose frames all carry one label are kept.
    NonMixed,
}

impl Mixing {
    pub fn name(self) -> &'static str {
        match self {
            Mixing::Mixed => "mixed",
            Mixing::NonMixed => "non-mixed",
        }
    }
}

impl std::str::FromStr for Mixing {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mixed" => Ok(Mixing::Mixed),
            "non-mixed" | "nonmixed" => Ok(Mixing::NonMixed),
            _ => Err(Error::invalid(format!("unknown mixing '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WindowConfig {
    pub window_len: usize,
    pub step: usize,
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self {
            window_len: 15,
            step: 1,
        }
    }
}

/// A run of consecutive feature rows with the label of its center frame.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedExample {
    /// `window_len x feature_dim`
    pub feature_window: Array2<f64>,
    pub label: Class,
    pub center_frame: usize,
    pub center_time: f64,
    pub mixed: bool,
}

impl WindowedExample {
    /// Column means of the window, the flat vector classical models consume.
    pub fn mean_row(&self) -> Array1<f64> {
        self.feature_window
            .mean_axis(Axis(0))
            .expect("window has at least one row")
    }
}

/// Cuts sliding windows over per-frame features.
///
/// `labels[k]` is the annotation at the center of frame `k` (`None` when the
/// frame center is unannotated). Mixed windows need an odd length and take the
/// center frame's label; windows with an unlabeled center are skipped.
/// Non-mixed windows are emitted only when every frame shares one label.
pub fn sliding_windows(
    features: ArrayView2<'_, f64>,
    frame_times: &[f64],
    labels: &[Option<Class>],
    config: WindowConfig,
    mixing: Mixing,
) -> Result<Vec<WindowedExample>> {
    let n = features.nrows();
    let w = config.window_len;
    if labels.len() != n || frame_times.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: labels.len().min(frame_times.len()),
        });
    }
    if w == 0 || config.step == 0 {
        return Err(Error::invalid("window length and step must be positive"));
    }
    if w > n {
        return Err(Error::invalid(format!(
            "window of {w} frames exceeds the {n} available"
        )));
    }
    if mixing == Mixing::Mixed && w % 2 == 0 {
        return Err(Error::invalid("mixed windows need an odd length"));
    }
    let half = w / 2;
    let mut out = Vec::new();
    for start in (0..=n - w).step_by(config.step) {
        let center = start + half;
        let span = &labels[start..start + w];
        let label = match mixing {
            Mixing::Mixed => span[half],
            Mixing::NonMixed => match span[0] {
                Some(l) if span.iter().all(|x| *x == Some(l)) => Some(l),
                _ => None,
            },
        };
        if let Some(label) = label {
            out.push(WindowedExample {
                feature_window: features.slice(s![start..start + w, ..]).to_owned(),
                label,
                center_frame: center,
                center_time: frame_times[center],
                mixed: mixing == Mixing::Mixed,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn clip(n: usize) -> AudioClip {
        AudioClip::new((0..n).map(|i| ((i * 7919) % 255) as f64 / 255.0).collect(), 8000, "s", "c").unwrap()
    }

    #[test]
    fn forty_twenty_at_8k() {
        let fs = frame_signal(&clip(8000), 40.0, 20.0).unwrap();
        assert_eq!((fs.frame_len, fs.hop, fs.n_frames()), (320, 160, 49));
        assert_eq!(fs.frames.row(3)[0], clip(8000).samples()[480]);
    }

    #[test]
    fn exact_single_frame_and_too_short() {
        assert_eq!(frame_signal(&clip(320), 40.0, 20.0).unwrap().n_frames(), 1);
        assert!(frame_signal(&clip(100), 40.0, 20.0).is_err());
    }

    #[test]
    fn dc_removal_examples() {
        assert_eq!(remove_dc(&[1.0, 1.0, 1.0, 1.0]), vec![0.0; 4]);
        assert_eq!(remove_dc(&[1.0, -1.0]), vec![1.0, -1.0]);
        assert_eq!(remove_dc(&[2.0, 0.0, 1.0, 1.0]), vec![1.0, -1.0, 0.0, 0.0]);
    }

    #[test]
    fn hamming_values() {
        let w = hamming_window(3).unwrap();
        assert!((w[0] - 0.08).abs() < 1e-15 && (w[1] - 1.0).abs() < 1e-15 && (w[2] - 0.08).abs() < 1e-15);
        let w = hamming_window(320).unwrap();
        for i in 0..320 {
            assert!((w[i] - w[319 - i]).abs() < 1e-15);
            assert!(w[i] > 0.0 && w[i] <= 1.0);
        }
        assert!((w[0] - 0.08).abs() < 1e-12);
        assert!(hamming_window(1).is_err());
    }

    fn labels(s: &str) -> Vec<Option<Class>> {
        s.chars()
            .map(|c| match c {
                'A' => Some(Class::Actuation),
                'B' => Some(Class::Inhalation),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn mixed_and_non_mixed_windows() {
        let feats = Array2::from_shape_fn((5, 2), |(i, j)| (i * 2 + j) as f64);
        let times: Vec<f64> = (0..5).map(|i| i as f64 * 0.02).collect();
        let lab = labels("AABBB");
        let cfg = WindowConfig { window_len: 3, step: 1 };
        let mixed = sliding_windows(feats.view(), &times, &lab, cfg, Mixing::Mixed).unwrap();
        let got: Vec<_> = mixed.iter().map(|w| (w.center_frame, w.label)).collect();
        assert_eq!(
            got,
            vec![(1, Class::Actuation), (2, Class::Inhalation), (3, Class::Inhalation)]
        );
        let pure = sliding_windows(feats.view(), &times, &lab, cfg, Mixing::NonMixed).unwrap();
        assert_eq!(pure.len(), 1);
        assert_eq!(pure[0].center_frame, 3);
        assert_eq!(pure[0].feature_window.row(0)[0], 4.0);

        let big = WindowConfig { window_len: 7, step: 1 };
        assert!(sliding_windows(feats.view(), &times, &lab, big, Mixing::Mixed).is_err());
        let even = WindowConfig { window_len: 2, step: 1 };
        assert!(sliding_windows(feats.view(), &times, &lab, even, Mixing::Mixed).is_err());
    }

    proptest! {
        #[test]
        fn rectangular_overlap_add_reconstructs(len in 1usize..2000, n in 1usize..64) {
            let samples: Vec<f64> = (0..len.max(n)).map(|i| (i as f64 * 0.37).sin()).collect();
            let fs = frame_samples(&samples, 8000, n, n, "c").unwrap();
            let joined: Vec<f64> = fs.frames.iter().copied().collect();
            prop_assert_eq!(&joined[..], &samples[..fs.n_frames() * n]);
            prop_assert!(samples.len() - joined.len() < n);
        }

        #[test]
        fn frame_count_formula(len in 320usize..5000, hop in 1usize..320) {
            let samples = vec![0.0; len];
            let fs = frame_samples(&samples, 8000, 320, hop, "c").unwrap();
            prop_assert_eq!(fs.n_frames(), (len - 320) / hop + 1);
        }

        #[test]
        fn non_mixed_positions_subset_of_mixed(raw in proptest::collection::vec(0u8..3, 3..40), w in 0usize..4) {
            let w = 2 * w + 1;
            prop_assume!(w <= raw.len());
            let lab: Vec<Option<Class>> = raw.iter().map(|&r| match r {
                0 => Some(Class::Noise), 1 => Some(Class::Exhalation), _ => None }).collect();
            let feats = Array2::zeros((lab.len(), 1));
            let times = vec![0.0; lab.len()];
            let cfg = WindowConfig { window_len: w, step: 1 };
            let m = sliding_windows(feats.view(), &times, &lab, cfg, Mixing::Mixed).unwrap();
            let p = sliding_windows(feats.view(), &times, &lab, cfg, Mixing::NonMixed).unwrap();
            for pw in &p {
                let hit = m.iter().find(|mw| mw.center_frame == pw.center_frame);
                prop_assert!(hit.is_some());
                prop_assert_eq!(hit.unwrap().label, pw.label);
            }
        }

        #[test]
        fn remove_dc_zero_mean(v in proptest::collection::vec(-1e3f64..1e3, 1..200)) {
            let out = remove_dc(&v);
            let mean = out.iter().sum::<f64>() / out.len() as f64;
            prop_assert!(mean.abs() < 1e-12 * (1.0 + v.iter().map(|x| x.abs()).fold(0.0, f64::max)));
        }
    }
}
