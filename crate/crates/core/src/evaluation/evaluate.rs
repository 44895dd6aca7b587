//! Cross-validated evaluation of one classifier on one feature corpus.

use std::collections::BTreeMap;

use ndarray::{ArrayView1, ArrayView2};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::corpus::CorpusFeatures;
use super::metrics::{ConfusionMatrix, Metrics};
use super::splits::{Protocol, SplitPlan};
use crate::class::Class;
use crate::classifiers::{derive_seed, ClassifierSpec, TrainedModel};
use crate::error::{Error, Result};
use crate::framing::Mixing;

/// Anything that labels a feature row.
pub trait Predictor {
    fn predict_row(&self, x: ArrayView1<'_, f64>) -> Result<Class>;
}

impl Predictor for TrainedModel {
    fn predict_row(&self, x: ArrayView1<'_, f64>) -> Result<Class> {
        TrainedModel::predict_row(self, x)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AccuracyMode {
    /// Correct over total across all test folds.
    #[default]
    Pooled,
    /// Unweighted mean of per-fold accuracies.
    FoldMean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    /// Training examples kept per class and fold; `None` keeps all.
    pub max_train_per_class: Option<usize>,
    pub accuracy: AccuracyMode,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            max_train_per_class: Some(300),
            accuracy: AccuracyMode::Pooled,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldOutcome {
    pub subject: Option<String>,
    pub n_train: usize,
    pub confusion: ConfusionMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub protocol: Protocol,
    pub mixing: Mixing,
    /// Sum of the fold confusion matrices.
    pub confusion: ConfusionMatrix,
    pub folds: Vec<FoldOutcome>,
    /// In `[0, 1]`; SingleSubj averages subjects with equal weight.
    pub accuracy: f64,
    /// Indexed by `Class::index`, from the pooled confusion matrix.
    pub per_class: Vec<Metrics>,
}

/// Evaluates `spec` under every mixing in `mixings`, training each fold once.
pub fn evaluate(
    plan: &SplitPlan,
    corpus: &CorpusFeatures,
    spec: &ClassifierSpec,
    config: &EvalConfig,
    mixings: &[Mixing],
) -> Result<Vec<EvalResult>> {
    evaluate_with(plan, corpus, config, mixings, |x, y, seed| spec.fit(x, y, seed))
}

/// Like [`evaluate`] with a caller-supplied trainer.
pub fn evaluate_with<M, F>(
    plan: &SplitPlan,
    corpus: &CorpusFeatures,
    config: &EvalConfig,
    mixings: &[Mixing],
    fit: F,
) -> Result<Vec<EvalResult>>
where
    M: Predictor,
    F: Fn(ArrayView2<'_, f64>, &[Class], u64) -> Result<M> + Sync,
{
    if plan.segments != corpus.segments {
        return Err(Error::invalid("corpus was extracted for a different segment list"));
    }
    let protocol_tag = Protocol::ALL.iter().position(|p| *p == plan.protocol).unwrap_or(0) as u64;
    let per_fold: Vec<Result<Vec<FoldOutcome>>> = plan
        .folds
        .par_iter()
        .enumerate()
        .map(|(f, fold)| {
            let seed = derive_seed(config.seed, &[protocol_tag, f as u64]);
            let (x, y) = corpus.gather(&fold.train, Mixing::NonMixed);
            let keep = subsample(&y, config.max_train_per_class, seed);
            let x = x.select(ndarray::Axis(0), &keep);
            let y: Vec<Class> = keep.iter().map(|&i| y[i]).collect();
            if y.is_empty() {
                return Err(Error::Training(format!("fold {f} has no training examples")));
            }
            let model = fit(x.view(), &y, seed)?;
            mixings
                .iter()
                .map(|&m| {
                    let (tx, ty) = corpus.gather(&fold.test, m);
                    let mut confusion = ConfusionMatrix::default();
                    for (row, &truth) in tx.rows().into_iter().zip(&ty) {
                        confusion.add(truth, model.predict_row(row)?);
                    }
                    Ok(FoldOutcome {
                        subject: fold.subject.clone(),
                        n_train: y.len(),
                        confusion,
                    })
                })
                .collect()
        })
        .collect();
    let per_fold = per_fold.into_iter().collect::<Result<Vec<_>>>()?;

    Ok(mixings
        .iter()
        .enumerate()
        .map(|(mi, &mixing)| {
            let folds: Vec<FoldOutcome> = per_fold.iter().map(|v| v[mi].clone()).collect();
            summarize(plan.protocol, mixing, folds, config.accuracy)
        })
        .collect())
}

fn summarize(protocol: Protocol, mixing: Mixing, folds: Vec<FoldOutcome>, mode: AccuracyMode) -> EvalResult {
    let mut confusion = ConfusionMatrix::default();
    for f in &folds {
        confusion.merge(&f.confusion);
    }
    let accuracy = if protocol == Protocol::SingleSubj {
        let mut by_subject: BTreeMap<Option<&str>, Vec<&FoldOutcome>> = BTreeMap::new();
        for f in &folds {
            by_subject.entry(f.subject.as_deref()).or_default().push(f);
        }
        mean(by_subject.values().filter_map(|fs| group_accuracy(fs, mode)))
    } else {
        group_accuracy(&folds.iter().collect::<Vec<_>>(), mode).unwrap_or(0.0)
    };
    let per_class = Class::ALL.iter().map(|&c| confusion.class_metrics(c)).collect();
    EvalResult {
        protocol,
        mixing,
        confusion,
        folds,
        accuracy,
        per_class,
    }
}

fn group_accuracy(folds: &[&FoldOutcome], mode: AccuracyMode) -> Option<f64> {
    match mode {
        AccuracyMode::Pooled => {
            let mut c = ConfusionMatrix::default();
            folds.iter().for_each(|f| c.merge(&f.confusion));
            (c.total() > 0).then(|| c.accuracy())
        }
        AccuracyMode::FoldMean => {
            let accs: Vec<f64> = folds
                .iter()
                .filter(|f| f.confusion.total() > 0)
                .map(|f| f.confusion.accuracy())
                .collect();
            (!accs.is_empty()).then(|| mean(accs.into_iter()))
        }
    }
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

/// Row indices keeping at most `cap` per class, in their original order.
fn subsample(y: &[Class], cap: Option<usize>, seed: u64) -> Vec<usize> {
    let Some(cap) = cap else {
        return (0..y.len()).collect();
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keep = Vec::new();
    for c in Class::ALL {
        let idx: Vec<usize> = (0..y.len()).filter(|&i| y[i] == c).collect();
        if idx.len() <= cap {
            keep.extend(idx);
        } else {
            keep.extend(sample(&mut rng, idx.len(), cap).into_iter().map(|j| idx[j]));
        }
    }
    keep.sort_unstable();
    keep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::splits::{plan_from_segments, SegmentRef};
    use crate::evaluation::SegmentExamples;
    use crate::features::FeatureKind;
    use crate::framing::WindowConfig;
    use ndarray::Array2;

    /// Four subjects, five segments per class each; the single feature equals
    /// the class index so a lookup rule is perfect.
    fn toy() -> (SplitPlan, CorpusFeatures) {
        let mut segs = Vec::new();
        for s in 0..4 {
            for c in Class::ALL {
                for j in 0..5 {
                    segs.push(SegmentRef {
                        clip: s,
                        subject: format!("s{s}"),
                        start: j as f64,
                        end: j as f64 + 1.0,
                        label: c,
                    });
                }
            }
        }
        let examples = segs
            .iter()
            .map(|s| SegmentExamples {
                non_mixed: Array2::from_elem((3, 1), s.label.index() as f64),
                mixed: Array2::from_elem((4, 1), s.label.index() as f64),
            })
            .collect();
        let corpus = CorpusFeatures {
            kind: FeatureKind::Volume,
            dim: 1,
            window: WindowConfig { window_len: 1, step: 1 },
            segments: segs.clone(),
            examples,
            warnings: vec![],
        };
        let plan = plan_from_segments(segs, Protocol::MultiSubj, Mixing::NonMixed, 0, 5).unwrap();
        (plan, corpus)
    }

    struct Const(Class);
    impl Predictor for Const {
        fn predict_row(&self, _: ArrayView1<'_, f64>) -> Result<Class> {
            Ok(self.0)
        }
    }
    struct Lookup;
    impl Predictor for Lookup {
        fn predict_row(&self, x: ArrayView1<'_, f64>) -> Result<Class> {
            Ok(Class::from_index(x[0] as usize).unwrap())
        }
    }

    #[test]
    fn constant_and_perfect_predictors() {
        let (plan, corpus) = toy();
        let cfg = EvalConfig::default();
        let r = evaluate_with(&plan, &corpus, &cfg, &[Mixing::NonMixed, Mixing::Mixed], |_, _, _| {
            Ok(Const(Class::Noise))
        })
        .unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0].accuracy - 0.25).abs() < 1e-12);
        assert_eq!(r[0].confusion.total(), 80 * 3);
        assert_eq!(r[1].confusion.total(), 80 * 4);
        let p = evaluate_with(&plan, &corpus, &cfg, &[Mixing::NonMixed], |_, _, _| Ok(Lookup)).unwrap();
        assert_eq!(p[0].accuracy, 1.0);
        assert!(p[0].per_class.iter().all(|m| m.f1 == 1.0));
    }

    #[test]
    fn single_subject_mean_over_subjects() {
        let (plan, corpus) = toy();
        let plan = plan_from_segments(plan.segments, Protocol::SingleSubj, Mixing::NonMixed, 0, 5).unwrap();
        let r = evaluate_with(&plan, &corpus, &EvalConfig::default(), &[Mixing::NonMixed], |_, _, _| Ok(Lookup))
            .unwrap();
        assert_eq!(r[0].folds.len(), 20);
        assert_eq!(r[0].accuracy, 1.0);
    }

    #[test]
    fn subsample_caps_each_class() {
        let y: Vec<Class> = (0..40).map(|i| Class::from_index(i % 4).unwrap()).collect();
        let k = subsample(&y, Some(3), 7);
        assert_eq!(k.len(), 12);
        assert_eq!(k, subsample(&y, Some(3), 7));
        assert!(k.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(subsample(&y, None, 0).len(), 40);
    }
}
