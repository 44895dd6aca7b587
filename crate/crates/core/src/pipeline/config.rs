//! The TOML run configuration shared by every command.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::audio_io::SynthSpec;
use crate::classifiers::{AdaOptions, BicOptions, ClassifierSpec, DetectorConfig, ForestOptions, SvmOptions};
use crate::error::{Error, Result};
use crate::evaluation::{EvalConfig, Protocol};
use crate::features::{FeatureConfig, FeatureKind};
use crate::framing::{Mixing, WindowConfig};

/// Every key is optional except `seed`, which must come from the file or the
/// command line. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: Option<u64>,
    /// JSON manifest of an on-disk corpus; the synthetic corpus is used when absent.
    pub dataset: Option<PathBuf>,
    pub synth: SynthSpec,
    pub out: PathBuf,
    pub features: Vec<FeatureKind>,
    pub feature_config: FeatureConfig,
    pub classifiers: Vec<ClassifierSpec>,
    pub protocols: Vec<Protocol>,
    pub mixings: Vec<Mixing>,
    /// Fold count for MultiSubj and SingleSubj.
    pub folds: usize,
    pub window: WindowConfig,
    pub eval: EvalConfig,
    /// Adds per-segment timing columns. Off by default because wall-clock
    /// numbers would make reports differ between runs.
    pub timing: bool,
    pub timing_samples: usize,
    pub detector: DetectorConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: None,
            dataset: None,
            synth: SynthSpec::default(),
            out: PathBuf::from("rda-out"),
            features: vec![FeatureKind::Spect, FeatureKind::Cepst, FeatureKind::Mfcc],
            feature_config: FeatureConfig::default(),
            classifiers: vec![
                ClassifierSpec::Gmm(BicOptions {
                    k_max: 8,
                    ..BicOptions::default()
                }),
                ClassifierSpec::Ada(AdaOptions::default()),
                ClassifierSpec::Svm(SvmOptions::default()),
                ClassifierSpec::Rf(ForestOptions::default()),
            ],
            protocols: Protocol::ALL.to_vec(),
            mixings: vec![Mixing::Mixed, Mixing::NonMixed],
            folds: 5,
            window: WindowConfig { window_len: 1, step: 1 },
            eval: EvalConfig::default(),
            timing: false,
            timing_samples: 1000,
            detector: DetectorConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a TOML file. Relative `dataset` and `out` paths resolve against
    /// the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        if let Some(d) = &cfg.dataset {
            cfg.dataset = Some(base.join(d));
        }
        if cfg.out.is_relative() {
            cfg.out = base.join(&cfg.out);
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Config("a seed is required (config key `seed` or --seed)".into()))
    }

    pub fn validate(&self) -> Result<()> {
        self.seed()?;
        if self.features.is_empty() {
            return Err(Error::Config("no feature kinds requested".into()));
        }
        if self.classifiers.is_empty() {
            return Err(Error::Config("no classifiers requested".into()));
        }
        if self.protocols.is_empty() || self.mixings.is_empty() {
            return Err(Error::Config("at least one protocol and one mixing are required".into()));
        }
        if self.folds < 2 {
            return Err(Error::Config("folds must be at least 2".into()));
        }
        if self.window.window_len == 0 || self.window.window_len % 2 == 0 {
            return Err(Error::Config("window_len must be odd".into()));
        }
        if self.dataset.is_none() {
            self.synth.validate()?;
        }
        Ok(())
    }
}
