use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{load_labels, load_wav, AnnotatedSegment, AudioClip};
use crate::class::Class;
use crate::error::{Error, Result};

/// On-disk manifest layout:
/// `{"subjects":[{"id":..., "clips":[{"wav":..., "labels":...}]}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestFile {
    pub subjects: Vec<SubjectEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubjectEntry {
    pub id: String,
    pub clips: Vec<ClipEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClipEntry {
    pub wav: PathBuf,
    pub labels: PathBuf,
}

/// Flattened manifest with per-class segment counts.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DatasetManifest {
    /// `(wav_path, label_path, subject_id)`
    pub entries: Vec<(PathBuf, PathBuf, String)>,
    pub class_counts: BTreeMap<Class, usize>,
}

impl DatasetManifest {
    pub fn subjects(&self) -> BTreeSet<&str> {
        self.entries.iter().map(|(_, _, s)| s.as_str()).collect()
    }

    pub fn to_file(&self) -> ManifestFile {
        let mut by_subject: BTreeMap<&str, Vec<ClipEntry>> = BTreeMap::new();
        for (wav, labels, s) in &self.entries {
            by_subject.entry(s).or_default().push(ClipEntry {
                wav: wav.clone(),
                labels: labels.clone(),
            });
        }
        ManifestFile {
            subjects: by_subject
                .into_iter()
                .map(|(id, clips)| SubjectEntry {
                    id: id.to_string(),
                    clips,
                })
                .collect(),
        }
    }
}

/// A clip together with its annotations.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledClip {
    pub clip: AudioClip,
    pub segments: Vec<AnnotatedSegment>,
}

/// Clips held in memory, with the manifest that describes them.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub manifest: DatasetManifest,
    pub clips: Vec<LabeledClip>,
    pub warnings: Vec<String>,
}

impl Dataset {
    /// Recomputes `manifest.class_counts` from the loaded segments.
    pub fn recount(&mut self) {
        let mut counts = BTreeMap::new();
        for c in &self.clips {
            for s in &c.segments {
                *counts.entry(s.label).or_insert(0) += 1;
            }
        }
        self.manifest.class_counts = counts;
    }

    pub fn subjects(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self.clips.iter().map(|c| c.clip.subject_id.as_str()).collect();
        set.into_iter().map(str::to_string).collect()
    }
}

/// Loads every clip listed in a JSON manifest. Relative paths resolve against
/// the manifest's directory.
pub fn load_dataset(manifest_path: impl AsRef<Path>) -> Result<Dataset> {
    let manifest_path = manifest_path.as_ref();
    let text = std::fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let file: ManifestFile =
        serde_json::from_str(&text).map_err(|e| Error::Manifest(e.to_string()))?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    if file.subjects.is_empty() {
        return Err(Error::Manifest("no subjects listed".into()));
    }

    let mut seen = BTreeSet::new();
    let mut ds = Dataset::default();
    for subject in &file.subjects {
        for entry in &subject.clips {
            let wav = base.join(&entry.wav);
            let labels = base.join(&entry.labels);
            for p in [&wav, &labels] {
                if !seen.insert(p.clone()) {
                    return Err(Error::Manifest(format!("path listed twice: {}", p.display())));
                }
            }
            let mut clip = load_wav(&wav)?;
            clip.subject_id = subject.id.clone();
            let track = load_labels(&labels)?;
            ds.warnings.extend(
                track
                    .warnings
                    .into_iter()
                    .map(|w| format!("{}: {w}", labels.display())),
            );
            ds.manifest
                .entries
                .push((wav.clone(), labels.clone(), subject.id.clone()));
            ds.clips.push(LabeledClip {
                clip,
                segments: track.segments,
            });
        }
    }
    ds.recount();
    Ok(ds)
}
