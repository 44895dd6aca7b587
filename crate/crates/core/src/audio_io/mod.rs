//! Audio ingestion: WAV decoding, Audacity label tracks, dataset manifests,
//! segment slicing and the seeded synthetic corpus generator.

mod labels;
mod manifest;
mod slice;
mod synth;
mod wav;

pub use labels::{load_labels, parse_labels, unambiguous_segments, write_labels, AnnotatedSegment, LabelTrack};
pub use manifest::{load_dataset, ClipEntry, Dataset, DatasetManifest, LabeledClip, ManifestFile, SubjectEntry};
pub use slice::{slice_segments, Slices};
pub use synth::{synthesize_dataset, ClassRecipe, SynthSpec};
pub use wav::{load_wav, read_wav, write_wav, BitDepth};

use crate::error::{Error, Result};

/// A mono recording with amplitudes normalized to `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    samples: Vec<f64>,
    sample_rate: u32,
    pub subject_id: String,
    pub clip_id: String,
}

impl AudioClip {
    /// Builds a clip, rejecting empty, non-finite or out-of-range input.
    pub fn new(
        samples: Vec<f64>,
        sample_rate: u32,
        subject_id: impl Into<String>,
        clip_id: impl Into<String>,
    ) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::invalid("sample rate must be positive"));
        }
        if samples.is_empty() {
            return Err(Error::invalid("clip must contain at least one sample"));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite() || s.abs() > 1.0) {
            return Err(Error::invalid(format!(
                "sample {i} is not a finite amplitude in [-1, 1]: {}",
                samples[i]
            )));
        }
        Ok(Self {
            samples,
            sample_rate,
            subject_id: subject_id.into(),
            clip_id: clip_id.into(),
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Duration in seconds.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }
}

/// Sample index for a time in seconds, floor convention.
///
/// The tiny bias absorbs decimal round trips through label files: a boundary
/// written as `0.154250` must map back to sample 1234 at 8 kHz, not 1233.
pub fn time_to_index(t: f64, sample_rate: u32) -> usize {
    let x = t * sample_rate as f64 + 1e-6;
    if x <= 0.0 {
        0
    } else {
        x.floor() as usize
    }
}
