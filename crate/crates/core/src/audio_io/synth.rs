//! Seeded desk-scale corpus generator.
//!
//! Every random draw comes from a ChaCha8 stream seeded with `SynthSpec::seed`
//! and consumed in a fixed order (subjects, then clips, then events), so the
//! same spec always yields the same samples. Signal shaping uses only
//! additions and multiplications after the filter coefficients are derived.

use std::f64::consts::PI;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{AnnotatedSegment, AudioClip, BitDepth, Dataset, DatasetManifest, LabeledClip};
use crate::class::Class;
use crate::error::{Error, Result};

/// Spectral recipe for one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassRecipe {
    pub label: Class,
    /// Pass band in Hz. `None` means broadband white noise.
    pub band_hz: Option<(f64, f64)>,
    /// Duration range in seconds, inclusive.
    pub duration_s: (f64, f64),
    /// Target RMS amplitude before subject gain.
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthSpec {
    pub seed: u64,
    pub subjects: usize,
    pub clips_per_subject: usize,
    pub sample_rate: u32,
    pub bit_depth: BitDepth,
    /// Half-width of the per-subject multiplicative band shift, e.g. 0.12 for ±12 %.
    pub subject_shift: f64,
    /// Per-subject gain range.
    pub subject_gain: (f64, f64),
    pub recipes: Vec<ClassRecipe>,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            seed: 42,
            subjects: 3,
            clips_per_subject: 10,
            sample_rate: 8000,
            bit_depth: BitDepth::Sixteen,
            subject_shift: 0.12,
            subject_gain: (0.6, 1.4),
            recipes: vec![
                ClassRecipe {
                    label: Class::Actuation,
                    band_hz: Some((2400.0, 3600.0)),
                    duration_s: (0.100, 0.150),
                    amplitude: 0.35,
                },
                ClassRecipe {
                    label: Class::Exhalation,
                    band_hz: Some((250.0, 700.0)),
                    duration_s: (0.5, 2.0),
                    amplitude: 0.15,
                },
                ClassRecipe {
                    label: Class::Inhalation,
                    band_hz: Some((900.0, 1800.0)),
                    duration_s: (0.5, 2.0),
                    amplitude: 0.12,
                },
                ClassRecipe {
                    label: Class::Noise,
                    band_hz: None,
                    duration_s: (0.2, 0.5),
                    amplitude: 0.015,
                },
            ],
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.subjects == 0 || self.clips_per_subject == 0 {
            return Err(Error::invalid("synth spec needs at least one subject and one clip"));
        }
        if self.sample_rate == 0 {
            return Err(Error::invalid("sample rate must be positive"));
        }
        let nyquist = self.sample_rate as f64 / 2.0;
        for c in Class::ALL {
            let r = self
                .recipe(c)
                .ok_or_else(|| Error::invalid(format!("missing recipe for {c}")))?;
            let (lo, hi) = r.duration_s;
            if !(lo > 0.0 && hi >= lo) {
                return Err(Error::invalid(format!("{c}: durations must be positive")));
            }
            if let Some((a, b)) = r.band_hz {
                if !(a > 0.0 && b > a && b < nyquist) {
                    return Err(Error::invalid(format!(
                        "{c}: band {a}-{b} Hz must lie strictly below Nyquist ({nyquist} Hz)"
                    )));
                }
            }
            if !(r.amplitude > 0.0 && r.amplitude < 1.0) {
                return Err(Error::invalid(format!("{c}: amplitude must be in (0, 1)")));
            }
        }
        if !(0.0..0.5).contains(&self.subject_shift) {
            return Err(Error::invalid("subject_shift must be in [0, 0.5)"));
        }
        Ok(())
    }

    fn recipe(&self, c: Class) -> Option<&ClassRecipe> {
        self.recipes.iter().find(|r| r.label == c)
    }
}

/// Order of events inside one synthetic "inhaler use" recording.
const LAYOUT: [Class; 6] = [
    Class::Noise,
    Class::Exhalation,
    Class::Noise,
    Class::Actuation,
    Class::Inhalation,
    Class::Noise,
];

struct SubjectTraits {
    shift: f64,
    gain: f64,
}

/// Generates the corpus in memory. Manifest paths are the relative names
/// `cmd_synth` would write (`<subject>/<clip>.wav`, `<subject>/<clip>.txt`).
pub fn synthesize_dataset(spec: &SynthSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let fs = spec.sample_rate;
    let mut ds = Dataset::default();
    let mut entries = Vec::new();

    for s in 0..spec.subjects {
        let subject_id = format!("s{:02}", s + 1);
        let traits = SubjectTraits {
            shift: 1.0 + spec.subject_shift * (2.0 * rng.random::<f64>() - 1.0),
            gain: spec.subject_gain.0 + (spec.subject_gain.1 - spec.subject_gain.0) * rng.random::<f64>(),
        };
        for c in 0..spec.clips_per_subject {
            let clip_id = format!("{subject_id}_c{:03}", c + 1);
            let (samples, segments) = synth_clip(spec, &traits, &mut rng);
            let clip = AudioClip::new(samples, fs, subject_id.clone(), clip_id.clone())?;
            entries.push((
                PathBuf::from(&subject_id).join(format!("{clip_id}.wav")),
                PathBuf::from(&subject_id).join(format!("{clip_id}.txt")),
                subject_id.clone(),
            ));
            ds.clips.push(LabeledClip { clip, segments });
        }
    }
    ds.manifest = DatasetManifest {
        entries,
        class_counts: Default::default(),
    };
    ds.recount();
    Ok(ds)
}

fn synth_clip(
    spec: &SynthSpec,
    traits: &SubjectTraits,
    rng: &mut ChaCha8Rng,
) -> (Vec<f64>, Vec<AnnotatedSegment>) {
    let fs = spec.sample_rate as f64;
    let nyquist = fs / 2.0;
    let mut samples = Vec::new();
    let mut segments = Vec::new();
    let clip_gain = 1.0 + 0.1 * (2.0 * rng.random::<f64>() - 1.0);

    for class in LAYOUT {
        let r = spec.recipe(class).expect("validated");
        let n_lo = (r.duration_s.0 * fs).ceil() as usize;
        let n_hi = ((r.duration_s.1 * fs).floor() as usize).max(n_lo);
        let n = rng.random_range(n_lo..=n_hi);
        let mut event: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        if let Some((lo, hi)) = r.band_hz {
            let lo = (lo * traits.shift).min(0.9 * nyquist);
            let hi = (hi * traits.shift).clamp(lo * 1.05, 0.95 * nyquist);
            band_pass(&mut event, fs, lo, hi);
            band_pass(&mut event, fs, lo, hi);
        }
        let rms = (event.iter().map(|x| x * x).sum::<f64>() / n as f64).sqrt();
        let target = r.amplitude * traits.gain * clip_gain;
        let k = if rms > 0.0 { target / rms } else { 0.0 };
        let taper = ((0.005 * fs) as usize).min(n / 4);
        for (i, x) in event.iter_mut().enumerate() {
            let edge = i.min(n - 1 - i);
            let w = if edge < taper {
                0.5 - 0.5 * (PI * edge as f64 / taper as f64).cos()
            } else {
                1.0
            };
            *x *= k * w;
        }
        let start = samples.len();
        samples.extend(event);
        segments.push(
            AnnotatedSegment::new(start as f64 / fs, samples.len() as f64 / fs, class)
                .expect("non-empty event"),
        );
    }
    for x in &mut samples {
        *x = spec.bit_depth.quantize(x.clamp(-1.0, 1.0));
    }
    (samples, segments)
}

/// In-place RBJ band-pass biquad (0 dB peak gain) centred on the band's
/// geometric mean.
fn band_pass(x: &mut [f64], fs: f64, lo: f64, hi: f64) {
    let f0 = (lo * hi).sqrt();
    let q = f0 / (hi - lo);
    let w0 = 2.0 * PI * f0 / fs;
    let alpha = w0.sin() / (2.0 * q);
    let a0 = 1.0 + alpha;
    let (b0, b2) = (alpha / a0, -alpha / a0);
    let (a1, a2) = (-2.0 * w0.cos() / a0, (1.0 - alpha) / a0);
    let (mut x1, mut x2, mut y1, mut y2) = (0.0, 0.0, 0.0, 0.0);
    for v in x.iter_mut() {
        let y = b0 * *v + b2 * x2 - a1 * y1 - a2 * y2;
        x2 = x1;
        x1 = *v;
        y2 = y1;
        y1 = y;
        *v = y;
    }
}
