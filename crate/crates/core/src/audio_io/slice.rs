use super::{time_to_index, AnnotatedSegment, AudioClip};
use crate::class::Class;

/// Output of [`slice_segments`]: the labeled sub-clips and any skip warnings.
#[derive(Debug, Clone, Default)]
pub struct Slices {
    pub clips: Vec<(AudioClip, Class)>,
    pub warnings: Vec<String>,
}

/// Cuts labeled sub-clips out of `clip`.
///
/// Sample ranges are `floor(start*fs)..floor(end*fs)`. Segments reaching past
/// the clip or collapsing to zero samples are skipped with a warning. Each
/// slice inherits the parent's subject id; its clip id gets a `#k` suffix.
pub fn slice_segments(clip: &AudioClip, segments: &[AnnotatedSegment]) -> Slices {
    let fs = clip.sample_rate();
    let mut out = Slices::default();
    for (k, seg) in segments.iter().enumerate() {
        if seg.start < 0.0 || seg.end > clip.duration() + 1e-9 {
            out.warnings.push(format!(
                "{}: segment {:.6}-{:.6} outside clip of {:.6} s, skipped",
                clip.clip_id,
                seg.start,
                seg.end,
                clip.duration()
            ));
            continue;
        }
        let a = time_to_index(seg.start, fs);
        let b = time_to_index(seg.end, fs).min(clip.len());
        if b <= a {
            out.warnings.push(format!(
                "{}: segment {:.6}-{:.6} is shorter than one sample, skipped",
                clip.clip_id, seg.start, seg.end
            ));
            continue;
        }
        let sub = AudioClip::new(
            clip.samples()[a..b].to_vec(),
            fs,
            clip.subject_id.clone(),
            format!("{}#{k}", clip.clip_id),
        )
        .expect("slice of a valid clip is valid");
        out.clips.push((sub, seg.label));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clip(n: usize) -> AudioClip {
        let s = (0..n).map(|i| ((i % 200) as f64 / 100.0) - 1.0).collect();
        AudioClip::new(s, 8000, "subj", "c0").unwrap()
    }

    #[test]
    fn quarter_second_slice() {
        let c = clip(8000);
        let seg = AnnotatedSegment::new(0.25, 0.5, Class::Noise).unwrap();
        let out = slice_segments(&c, &[seg]);
        assert_eq!(out.clips.len(), 1);
        assert_eq!(out.clips[0].0.len(), 2000);
        assert_eq!(out.clips[0].0.subject_id, "subj");
        assert_eq!(out.clips[0].1, Class::Noise);
    }

    #[test]
    fn empty_segment_list() {
        let out = slice_segments(&clip(100), &[]);
        assert!(out.clips.is_empty() && out.warnings.is_empty());
    }

    #[test]
    fn out_of_bounds_segment_skipped() {
        let seg = AnnotatedSegment::new(0.9, 1.5, Class::Noise).unwrap();
        let out = slice_segments(&clip(8000), &[seg]);
        assert!(out.clips.is_empty());
        assert_eq!(out.warnings.len(), 1);
    }

    #[test]
    fn tiling_segments_reconcatenate_exactly() {
        let c = clip(8000);
        let bounds = [0.0, 0.1234, 0.3, 0.61, 0.999, 1.0];
        let segs: Vec<_> = bounds
            .windows(2)
            .map(|w| AnnotatedSegment::new(w[0], w[1], Class::Noise).unwrap())
            .collect();
        let out = slice_segments(&c, &segs);
        let joined: Vec<f64> = out
            .clips
            .iter()
            .flat_map(|(s, _)| s.samples().iter().copied())
            .collect();
        assert_eq!(joined, c.samples());
    }
}
