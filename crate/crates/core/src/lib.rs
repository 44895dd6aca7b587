//! Benchmark suite for respiratory and inhaler-actuation sound classification.
//!
//! The crate covers the whole path from audio to a report table:
//!
//! * [`audio_io`]: WAV and label-track ingestion, manifests, synthetic corpora
//! * [`framing`]: frames, windows and center-labeled sliding windows
//! * [`features`]: time, spectral, cepstral, mel and wavelet descriptors
//! * [`classifiers`]: GMM, QDA, SVM, random forest, Adaboost, gradient boosting,
//!   the wavelet actuation detector and the Gaussian KL divergence
//! * [`evaluation`]: cross-validation protocols, metrics, timing and reports
//! * [`pipeline`]: run configuration and the batch commands behind the CLI

pub mod audio_io;
pub mod class;
pub mod classifiers;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod framing;
pub mod pipeline;

pub use class::Class;
pub use error::{Error, Result};

// The guide's code blocks run as doc-tests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/audio.md")]
    mod audio {}
    #[doc = include_str!("../../../book/src/framing.md")]
    mod framing {}
    #[doc = include_str!("../../../book/src/features.md")]
    mod features {}
    #[doc = include_str!("../../../book/src/classifiers.md")]
    mod classifiers {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/running.md")]
    mod running {}
}
