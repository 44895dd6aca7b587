//! Classifiers behind one train/predict contract.
//!
//! [`ClassifierSpec`] names a method and its hyperparameters;
//! [`ClassifierSpec::fit`] returns a [`TrainedModel`] that scores rows for
//! all four classes. Binary learners (Adaboost, gradient boosting, SVM) are
//! lifted to four classes one-vs-rest. Every prediction is the argmax of the
//! per-class scores with ties going to the lowest class index.

pub mod adaboost;
pub mod detector;
pub mod forest;
pub mod gbdt;
pub mod gmm;
pub mod kld;
mod linalg;
pub mod qda;
pub mod stump;
pub mod svm;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

pub use adaboost::{adaboost_train, AdaboostModel, AdaboostTrace};
pub use detector::{detect_actuation_cwt, merge_events, ActuationEvent, DetectorConfig};
pub use forest::{rf_train, ForestModel, ForestOptions};
pub use gbdt::{gbdt_train_binary, GbdtBinary};
pub use gmm::{gmm_bic_select, gmm_classify, gmm_fit_em, BicOptions, BicSelection, CovType, EmFit, EmOptions, Gmm};
pub use kld::kld_gaussian;
pub use qda::{qda_fit, QdaModel};
pub use svm::{svm_train, Kernel, SvmModel, SvmOptions};

use crate::class::Class;
use crate::error::{Error, Result};

/// Version tag written into serialized models.
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Index of the largest value; ties and all-`-inf` inputs go to the lowest
/// index. NaN never wins.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] || (v[best].is_nan() && !x.is_nan()) {
            best = i;
        }
    }
    best
}

/// Mixes `parts` into `seed` (SplitMix64 steps) for independent sub-streams.
pub(crate) fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    parts.iter().fold(mix(seed), |acc, &p| mix(acc ^ mix(p)))
}

/// One binary model per class, trained with that class as `+1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ovr<M> {
    /// `None` for classes absent from training; they score `-inf`.
    pub models: Vec<Option<M>>,
}

impl<M> Ovr<M> {
    /// Trains `train(class, targets)` for each class present in `labels`,
    /// with targets `+1` for that class and `-1` otherwise.
    pub fn fit(labels: &[usize], n_classes: usize, mut train: impl FnMut(usize, &[f64]) -> Result<M>) -> Result<Self> {
        let present: Vec<bool> = (0..n_classes).map(|k| labels.contains(&k)).collect();
        if present.iter().filter(|p| **p).count() < 2 {
            return Err(Error::Training("one-vs-rest needs at least two classes".into()));
        }
        let mut models = Vec::with_capacity(n_classes);
        for k in 0..n_classes {
            if !present[k] {
                log::debug!("one-vs-rest: class {k} absent from training data");
                models.push(None);
                continue;
            }
            let y: Vec<f64> = labels.iter().map(|&l| if l == k { 1.0 } else { -1.0 }).collect();
            models.push(Some(train(k, &y)?));
        }
        Ok(Self { models })
    }

    pub fn scores(&self, score: impl Fn(&M) -> f64) -> Vec<f64> {
        self.models
            .iter()
            .map(|m| m.as_ref().map_or(f64::NEG_INFINITY, &score))
            .collect()
    }
}

/// Per-feature affine standardization fitted on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: ArrayView2<'_, f64>) -> Self {
        let mean = x.mean_axis(Axis(0)).expect("non-empty");
        let scale = x
            .std_axis(Axis(0), 0.0)
            .iter()
            .map(|&s| if s > 0.0 && s.is_finite() { s } else { 1.0 })
            .collect();
        Self {
            mean: mean.to_vec(),
            scale,
        }
    }

    pub fn apply_row(&self, x: ArrayView1<'_, f64>) -> Array1<f64> {
        Array1::from_iter(x.iter().zip(self.mean.iter().zip(&self.scale)).map(|(v, (m, s))| (v - m) / s))
    }

    pub fn apply(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        let mut out = x.to_owned();
        for mut row in out.rows_mut() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (*v - self.mean[j]) / self.scale[j];
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QdaOptions {
    pub shrinkage: f64,
}

impl Default for QdaOptions {
    fn default() -> Self {
        Self { shrinkage: 0.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdaOptions {
    pub rounds: usize,
}

impl Default for AdaOptions {
    fn default() -> Self {
        Self { rounds: 100 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GbdtOptions {
    pub rounds: usize,
    pub learning_rate: f64,
}

impl Default for GbdtOptions {
    fn default() -> Self {
        Self {
            rounds: 100,
            learning_rate: 0.1,
        }
    }
}

/// A classifier and its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ClassifierSpec {
    /// Per-class GMM chosen by BIC, maximum-likelihood decision.
    Gmm(BicOptions),
    Qda(QdaOptions),
    /// One-vs-rest Adaboost over stumps.
    Ada(AdaOptions),
    /// One-vs-rest gradient-boosted stumps.
    Gbdt(GbdtOptions),
    /// One-vs-rest SVM on standardized features.
    Svm(SvmOptions),
    /// Random forest.
    Rf(ForestOptions),
}

impl ClassifierSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ClassifierSpec::Gmm(_) => "gmm",
            ClassifierSpec::Qda(_) => "qda",
            ClassifierSpec::Ada(_) => "ada",
            ClassifierSpec::Gbdt(_) => "gbdt",
            ClassifierSpec::Svm(_) => "svm",
            ClassifierSpec::Rf(_) => "rf",
        }
    }

    /// Default hyperparameters for a method name.
    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name.trim().to_ascii_lowercase().as_str() {
            "gmm" => ClassifierSpec::Gmm(BicOptions::default()),
            "qda" => ClassifierSpec::Qda(QdaOptions::default()),
            "ada" | "adaboost" => ClassifierSpec::Ada(AdaOptions::default()),
            "gbdt" => ClassifierSpec::Gbdt(GbdtOptions::default()),
            "svm" => ClassifierSpec::Svm(SvmOptions::default()),
            "rf" => ClassifierSpec::Rf(ForestOptions::default()),
            other => return Err(Error::invalid(format!("unknown classifier '{other}'"))),
        })
    }

    /// Trains on the rows of `x`. Deterministic in `(x, y, self, seed)`.
    pub fn fit(&self, x: ArrayView2<'_, f64>, y: &[Class], seed: u64) -> Result<TrainedModel> {
        let (n, d) = x.dim();
        if y.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: y.len() });
        }
        if n == 0 || d == 0 {
            return Err(Error::Training("empty training set".into()));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Training("training data contains non-finite values".into()));
        }
        let labels: Vec<usize> = y.iter().map(|c| c.index()).collect();
        let k = Class::COUNT;
        let params = match self {
            ClassifierSpec::Gmm(opts) => {
                let mut classes = Vec::with_capacity(k);
                for c in 0..k {
                    let rows: Vec<usize> = (0..n).filter(|&i| labels[i] == c).collect();
                    if rows.len() < 2 {
                        log::debug!("gmm: class {c} has {} training rows, left unmodelled", rows.len());
                        classes.push(None);
                        continue;
                    }
                    let xc = x.select(Axis(0), &rows);
                    let sel = gmm_bic_select(xc.view(), opts, derive_seed(seed, &[c as u64]))?;
                    classes.push(Some(sel.model));
                }
                if classes.iter().flatten().count() == 0 {
                    return Err(Error::Training("no class has enough rows for a GMM".into()));
                }
                ModelParams::Gmm { classes }
            }
            ClassifierSpec::Qda(o) => ModelParams::Qda(qda_fit(x, &labels, k, o.shrinkage)?),
            ClassifierSpec::Ada(o) => ModelParams::Ada(Ovr::fit(&labels, k, |_, yb| Ok(adaboost_train(x, yb, o.rounds)?.0))?),
            ClassifierSpec::Gbdt(o) => ModelParams::Gbdt(Ovr::fit(&labels, k, |_, yb| {
                let t: Vec<f64> = yb.iter().map(|v| if *v > 0.0 { 1.0 } else { 0.0 }).collect();
                Ok(gbdt_train_binary(x, &t, o.rounds, o.learning_rate)?.0)
            })?),
            ClassifierSpec::Svm(o) => {
                let standardizer = Standardizer::fit(x);
                let xs = standardizer.apply(x);
                let kernel = match o.kernel {
                    Kernel::Rbf { gamma: None } => Kernel::Rbf {
                        gamma: Some(1.0 / d as f64),
                    },
                    k => k,
                };
                let gram = svm::gram(xs.view(), kernel);
                let ovr = Ovr::fit(&labels, k, |_, yb| svm::svm_train_gram(xs.view(), &gram, yb, kernel, o))?;
                ModelParams::Svm { standardizer, ovr }
            }
            ClassifierSpec::Rf(o) => ModelParams::Rf(rf_train(x, &labels, k, o, seed)?),
        };
        Ok(TrainedModel {
            spec: self.clone(),
            dim: d,
            params,
        })
    }
}

/// Fitted parameters of each method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelParams {
    Gmm { classes: Vec<Option<Gmm>> },
    Qda(QdaModel),
    Ada(Ovr<AdaboostModel>),
    Gbdt(Ovr<GbdtBinary>),
    Svm { standardizer: Standardizer, ovr: Ovr<SvmModel> },
    Rf(ForestModel),
}

/// An immutable fitted classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub spec: ClassifierSpec,
    /// Feature dimension seen in training.
    pub dim: usize,
    pub params: ModelParams,
}

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    format_version: u32,
    model: T,
}

impl TrainedModel {
    /// Scores for the four classes; higher is more likely.
    pub fn scores_row(&self, x: ArrayView1<'_, f64>) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(match &self.params {
            ModelParams::Gmm { classes } => classes
                .iter()
                .map(|m| m.as_ref().map_or(f64::NEG_INFINITY, |g| g.log_pdf(x)))
                .collect(),
            ModelParams::Qda(q) => q.scores(x),
            ModelParams::Ada(ovr) => {
                let v = x.to_vec();
                ovr.scores(|m| m.score(&v))
            }
            ModelParams::Gbdt(ovr) => {
                let v = x.to_vec();
                ovr.scores(|m| m.score(&v))
            }
            ModelParams::Svm { standardizer, ovr } => {
                let z = standardizer.apply_row(x);
                ovr.scores(|m| m.decision(z.view()))
            }
            ModelParams::Rf(f) => f.votes(&x.to_vec()),
        })
    }

    pub fn predict_row(&self, x: ArrayView1<'_, f64>) -> Result<Class> {
        Ok(Class::from_index(argmax(&self.scores_row(x)?)).expect("four scores"))
    }

    /// `n x 4` score matrix.
    pub fn predict_scores(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let mut out = Array2::zeros((x.nrows(), Class::COUNT));
        for (i, row) in x.rows().into_iter().enumerate() {
            let s = self.scores_row(row)?;
            out.row_mut(i).assign(&Array1::from(s));
        }
        Ok(out)
    }

    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Vec<Class>> {
        x.rows().into_iter().map(|r| self.predict_row(r)).collect()
    }

    /// `{"format_version": 1, "model": {...}}`.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&Envelope {
            format_version: MODEL_FORMAT_VERSION,
            model: self,
        })?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let env: Envelope<TrainedModel> = serde_json::from_str(s)?;
        if env.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Serialization(format!(
                "unsupported model format version {}",
                env.format_version
            )));
        }
        let m = env.model;
        match &m.params {
            ModelParams::Gmm { classes } => {
                for g in classes.iter().flatten() {
                    g.validate()?;
                    if g.dim() != m.dim {
                        return Err(Error::DimensionMismatch { expected: m.dim, got: g.dim() });
                    }
                }
            }
            ModelParams::Qda(q) => q.validate()?,
            _ => {}
        }
        Ok(m)
    }
}
