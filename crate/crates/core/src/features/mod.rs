//! Per-frame feature extraction.
//!
//! The kernels live in the submodules ([`spectral`], [`mel`], [`time`],
//! [`wavelet`]); [`FeatureExtractor`] binds one [`FeatureKind`] to a frame
//! geometry and produces [`FeatureMatrix`] rows.

mod extract;
mod matrix;
pub mod mel;
pub mod spectral;
pub mod time;
pub mod wavelet;

pub use extract::{spectrogram, FeatureConfig, FeatureExtractor, FeatureKind, QDA30_NAMES};
pub use matrix::{read_binary, FeatureMatrix, FeatureMeta, BINARY_MAGIC};
