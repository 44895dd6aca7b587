//! Cross-validation plans over annotated segments.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::audio_io::{unambiguous_segments, Dataset};
use crate::class::Class;
use crate::error::{Error, Result};
use crate::framing::Mixing;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    /// All subjects pooled, stratified k-fold.
    MultiSubj,
    /// k-fold within each subject, averaged over subjects.
    SingleSubj,
    /// Leave one subject out.
    Loso,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::MultiSubj, Protocol::SingleSubj, Protocol::Loso];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::MultiSubj => "MultiSubj",
            Protocol::SingleSubj => "SingleSubj",
            Protocol::Loso => "LOSO",
        }
    }
}

impl std::fmt::Display for Protocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Protocol {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "multisubj" | "multi" => Ok(Protocol::MultiSubj),
            "singlesubj" | "single" => Ok(Protocol::SingleSubj),
            "loso" => Ok(Protocol::Loso),
            other => Err(Error::invalid(format!("unknown protocol '{other}'"))),
        }
    }
}

/// One annotated segment of one clip, the unit that folds are made of.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentRef {
    /// Index into `Dataset::clips`.
    pub clip: usize,
    pub subject: String,
    pub start: f64,
    pub end: f64,
    pub label: Class,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fold {
    /// The subject this fold belongs to (SingleSubj) or tests on (LOSO).
    pub subject: Option<String>,
    /// Indices into `SplitPlan::segments`.
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub protocol: Protocol,
    /// How test examples are cut; training always uses non-mixed segments.
    pub mixing: Mixing,
    pub segments: Vec<SegmentRef>,
    pub folds: Vec<Fold>,
    pub warnings: Vec<String>,
}

/// Every segment that overlaps no other annotation, in clip order.
pub fn dataset_segments(dataset: &Dataset) -> Vec<SegmentRef> {
    dataset
        .clips
        .iter()
        .enumerate()
        .flat_map(|(i, c)| {
            unambiguous_segments(&c.segments).into_iter().map(move |s| SegmentRef {
                clip: i,
                subject: c.clip.subject_id.clone(),
                start: s.start,
                end: s.end,
                label: s.label,
            })
        })
        .collect()
}

/// Builds the folds of `protocol`. Deterministic in `(dataset, seed, k)`.
pub fn make_splits(dataset: &Dataset, protocol: Protocol, mixing: Mixing, seed: u64, k: usize) -> Result<SplitPlan> {
    let segments = dataset_segments(dataset);
    plan_from_segments(segments, protocol, mixing, seed, k)
}

pub fn plan_from_segments(
    segments: Vec<SegmentRef>,
    protocol: Protocol,
    mixing: Mixing,
    seed: u64,
    k: usize,
) -> Result<SplitPlan> {
    if segments.is_empty() {
        return Err(Error::invalid("no annotated segments to split"));
    }
    let mut subjects: Vec<&str> = segments.iter().map(|s| s.subject.as_str()).collect();
    subjects.sort_unstable();
    subjects.dedup();
    let mut warnings = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all: Vec<usize> = (0..segments.len()).collect();

    let folds = match protocol {
        Protocol::MultiSubj => stratified(&segments, &all, k, &mut rng, None, &mut warnings)?,
        Protocol::SingleSubj => {
            let mut folds = Vec::new();
            for s in &subjects {
                let own: Vec<usize> = all.iter().copied().filter(|&i| segments[i].subject == *s).collect();
                if own.len() < 2 {
                    warnings.push(format!("subject {s}: fewer than two segments, skipped"));
                    continue;
                }
                let kk = k.min(own.len());
                if kk < k {
                    warnings.push(format!("subject {s}: only {} segments, using {kk} folds", own.len()));
                }
                folds.extend(stratified(&segments, &own, kk, &mut rng, Some(s), &mut warnings)?);
            }
            if folds.is_empty() {
                return Err(Error::invalid("no subject has enough segments for SingleSubj"));
            }
            folds
        }
        Protocol::Loso => {
            if subjects.len() < 2 {
                return Err(Error::invalid("LOSO needs at least two subjects"));
            }
            subjects
                .iter()
                .map(|s| {
                    let (test, train): (Vec<usize>, Vec<usize>) = all.iter().partition(|&&i| segments[i].subject == *s);
                    Fold {
                        subject: Some(s.to_string()),
                        train,
                        test,
                    }
                })
                .collect()
        }
    };
    Ok(SplitPlan {
        protocol,
        mixing,
        segments,
        folds,
        warnings,
    })
}

/// Stratified k-fold: each class is shuffled and dealt round-robin, the
/// dealer position carrying over between classes so fold sizes differ by at
/// most one.
fn stratified(
    segments: &[SegmentRef],
    pool: &[usize],
    k: usize,
    rng: &mut ChaCha8Rng,
    subject: Option<&str>,
    warnings: &mut Vec<String>,
) -> Result<Vec<Fold>> {
    if k < 2 {
        return Err(Error::invalid("k-fold needs k >= 2"));
    }
    if pool.len() < k {
        return Err(Error::invalid(format!("{} segments cannot fill {k} folds", pool.len())));
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut dealer = 0;
    for c in Class::ALL {
        let mut idx: Vec<usize> = pool.iter().copied().filter(|&i| segments[i].label == c).collect();
        if !idx.is_empty() && idx.len() < k {
            warnings.push(format!(
                "{}class {c}: {} segments for {k} folds, stratification relaxed",
                subject.map(|s| format!("subject {s}: ")).unwrap_or_default(),
                idx.len()
            ));
        }
        idx.shuffle(rng);
        for i in idx {
            members[dealer % k].push(i);
            dealer += 1;
        }
    }
    Ok((0..k)
        .map(|f| {
            let mut test = members[f].clone();
            test.sort_unstable();
            let mut train: Vec<usize> = members
                .iter()
                .enumerate()
                .filter(|(g, _)| *g != f)
                .flat_map(|(_, m)| m.iter().copied())
                .collect();
            train.sort_unstable();
            Fold {
                subject: subject.map(str::to_string),
                train,
                test,
            }
        })
        .collect())
}
