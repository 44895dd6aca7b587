//! Per-segment feature rows for both mixing regimes.

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;

use super::splits::SegmentRef;
use crate::audio_io::{time_to_index, Dataset};
use crate::class::Class;
use crate::error::{Error, Result};
use crate::features::{FeatureExtractor, FeatureKind};
use crate::framing::{sliding_windows, Mixing, WindowConfig};

/// Examples cut from one annotated segment.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentExamples {
    /// Windows framed from the segment alone, so no frame crosses a boundary.
    pub non_mixed: Array2<f64>,
    /// Windows of the continuous recording whose center falls in the segment.
    pub mixed: Array2<f64>,
}

impl SegmentExamples {
    pub fn get(&self, mixing: Mixing) -> ArrayView2<'_, f64> {
        match mixing {
            Mixing::Mixed => self.mixed.view(),
            Mixing::NonMixed => self.non_mixed.view(),
        }
    }
}

/// Feature examples for every segment of a split plan, computed once per
/// feature kind and shared across protocols and classifiers.
#[derive(Debug, Clone)]
pub struct CorpusFeatures {
    pub kind: FeatureKind,
    pub dim: usize,
    pub window: WindowConfig,
    pub segments: Vec<SegmentRef>,
    pub examples: Vec<SegmentExamples>,
    pub warnings: Vec<String>,
}

impl CorpusFeatures {
    pub fn labels(&self) -> Vec<Class> {
        self.segments.iter().map(|s| s.label).collect()
    }

    /// Stacks the examples of `indices` with one label per row.
    pub fn gather(&self, indices: &[usize], mixing: Mixing) -> (Array2<f64>, Vec<Class>) {
        let n: usize = indices.iter().map(|&i| self.examples[i].get(mixing).nrows()).sum();
        let mut x = Array2::zeros((n, self.dim));
        let mut y = Vec::with_capacity(n);
        let mut r = 0;
        for &i in indices {
            let block = self.examples[i].get(mixing);
            x.slice_mut(ndarray::s![r..r + block.nrows(), ..]).assign(&block);
            r += block.nrows();
            y.extend(std::iter::repeat_n(self.segments[i].label, block.nrows()));
        }
        (x, y)
    }
}

/// Examples per owned segment index, plus warnings, for one clip.
type ClipExamples = (Vec<(usize, SegmentExamples)>, Vec<String>);

/// Extracts `extractor` features for every segment.
///
/// Segments too short for one window contribute no non-mixed examples; their
/// mixed examples still come from the surrounding recording.
pub fn extract_corpus(
    dataset: &Dataset,
    segments: &[SegmentRef],
    extractor: &FeatureExtractor,
    window: WindowConfig,
) -> Result<CorpusFeatures> {
    let dim = extractor.dim();
    let per_clip: Vec<Result<ClipExamples>> = (0..dataset.clips.len())
        .into_par_iter()
        .map(|c| {
            let owned: Vec<usize> = (0..segments.len()).filter(|&i| segments[i].clip == c).collect();
            if owned.is_empty() {
                return Ok((Vec::new(), Vec::new()));
            }
            clip_examples(dataset, c, segments, &owned, extractor, window)
        })
        .collect();

    let mut examples: Vec<Option<SegmentExamples>> = vec![None; segments.len()];
    let mut warnings = Vec::new();
    for r in per_clip {
        let (ex, w) = r?;
        warnings.extend(w);
        for (i, e) in ex {
            examples[i] = Some(e);
        }
    }
    let examples = examples
        .into_iter()
        .enumerate()
        .map(|(i, e)| e.ok_or_else(|| Error::invalid(format!("segment {i} refers to a missing clip"))))
        .collect::<Result<Vec<_>>>()?;
    let empty = examples.iter().filter(|e| e.non_mixed.nrows() == 0).count();
    if empty > 0 {
        warnings.push(format!("{empty} segments shorter than one window have no non-mixed examples"));
    }
    Ok(CorpusFeatures {
        kind: extractor.kind(),
        dim,
        window,
        segments: segments.to_vec(),
        examples,
        warnings,
    })
}

fn clip_examples(
    dataset: &Dataset,
    c: usize,
    segments: &[SegmentRef],
    owned: &[usize],
    extractor: &FeatureExtractor,
    window: WindowConfig,
) -> Result<ClipExamples> {
    let clip = &dataset.clips[c].clip;
    let fs = clip.sample_rate();
    let dim = extractor.dim();
    let mut warnings = Vec::new();
    let mut mixed_rows: Vec<Vec<f64>> = vec![Vec::new(); owned.len()];

    if clip.len() >= extractor.frame_len() {
        let (series, m) = extractor.extract_clip(clip)?;
        let owner: Vec<Option<usize>> = series
            .frame_times
            .iter()
            .map(|&t| owned.iter().position(|&i| segments[i].start <= t && t < segments[i].end))
            .collect();
        let labels: Vec<Option<Class>> = owner.iter().map(|o| o.map(|j| segments[owned[j]].label)).collect();
        if m.n_rows() >= window.window_len {
            for w in sliding_windows(m.data.view(), &series.frame_times, &labels, window, Mixing::Mixed)? {
                let j = owner[w.center_frame].expect("labeled center has an owner");
                mixed_rows[j].extend(w.mean_row());
            }
        } else {
            warnings.push(format!("{}: recording shorter than one window", clip.clip_id));
        }
    } else {
        warnings.push(format!("{}: recording shorter than one frame", clip.clip_id));
    }

    let mut out = Vec::with_capacity(owned.len());
    for (j, &i) in owned.iter().enumerate() {
        let s = &segments[i];
        let a = time_to_index(s.start, fs).min(clip.len());
        let b = time_to_index(s.end, fs).min(clip.len());
        let mut rows = Vec::new();
        let needed = extractor.frame_len() + (window.window_len - 1) * extractor.hop();
        if b > a && b - a >= needed {
            let m = extractor.extract_samples(&clip.samples()[a..b], &clip.clip_id)?;
            let labels = vec![Some(s.label); m.n_rows()];
            let times = vec![0.0; m.n_rows()];
            for w in sliding_windows(m.data.view(), &times, &labels, window, Mixing::NonMixed)? {
                rows.extend(w.mean_row());
            }
        }
        let to_array = |v: Vec<f64>| Array2::from_shape_vec((v.len() / dim, dim), v).expect("whole rows");
        out.push((
            i,
            SegmentExamples {
                non_mixed: to_array(rows),
                mixed: to_array(std::mem::take(&mut mixed_rows[j])),
            },
        ));
    }
    Ok((out, warnings))
}
