use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::class::Class;
use crate::error::{Error, Result};

/// A labeled time interval inside a clip, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedSegment {
    pub start: f64,
    pub end: f64,
    pub label: Class,
}

impl AnnotatedSegment {
    pub fn new(start: f64, end: f64, label: Class) -> Result<Self> {
        if !(start.is_finite() && end.is_finite()) || start < 0.0 {
            return Err(Error::invalid(format!("bad segment bounds {start}..{end}")));
        }
        if end <= start {
            return Err(Error::invalid("end before start"));
        }
        Ok(Self { start, end, label })
    }

    pub fn duration(&self) -> f64 {
        self.end - self.start
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start && t < self.end
    }

    pub fn overlaps(&self, other: &AnnotatedSegment) -> bool {
        self.start < other.end && other.start < self.end
    }
}

/// Parsed label track: segments sorted by start, plus non-fatal warnings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabelTrack {
    pub segments: Vec<AnnotatedSegment>,
    pub warnings: Vec<String>,
}

pub fn load_labels(path: impl AsRef<Path>) -> Result<LabelTrack> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_labels(&text)
}

/// Parses an Audacity label track (`start<TAB>end<TAB>label` per line).
///
/// Spectral-selection continuation lines (leading `\`) and blank lines are
/// ignored. Overlapping segments are kept but reported in `warnings`.
pub fn parse_labels(text: &str) -> Result<LabelTrack> {
    let mut segments = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('\\') {
            continue;
        }
        let mut fields = line.split('\t');
        let (Some(s), Some(e), Some(l)) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Label {
                line: line_no,
                reason: "expected start<TAB>end<TAB>label".into(),
            });
        };
        let num = |f: &str| {
            f.trim().parse::<f64>().map_err(|_| Error::Label {
                line: line_no,
                reason: format!("non-numeric bound '{f}'"),
            })
        };
        let (start, end) = (num(s)?, num(e)?);
        let label = l.parse::<Class>().map_err(|err| Error::Label {
            line: line_no,
            reason: err.to_string(),
        })?;
        if end <= start {
            return Err(Error::Label {
                line: line_no,
                reason: "end before start".into(),
            });
        }
        let seg = AnnotatedSegment::new(start, end, label).map_err(|err| Error::Label {
            line: line_no,
            reason: err.to_string(),
        })?;
        segments.push(seg);
    }
    segments.sort_by(|a, b| a.start.total_cmp(&b.start).then(a.end.total_cmp(&b.end)));

    let mut warnings = Vec::new();
    for (i, a) in segments.iter().enumerate() {
        for b in &segments[i + 1..] {
            if b.start >= a.end {
                break;
            }
            warnings.push(format!(
                "overlapping segments {:.6}-{:.6} ({}) and {:.6}-{:.6} ({})",
                a.start, a.end, a.label, b.start, b.end, b.label
            ));
        }
    }
    Ok(LabelTrack { segments, warnings })
}

/// Segments that overlap no other segment, in input order.
pub fn unambiguous_segments(segments: &[AnnotatedSegment]) -> Vec<AnnotatedSegment> {
    segments
        .iter()
        .enumerate()
        .filter(|(i, s)| {
            !segments
                .iter()
                .enumerate()
                .any(|(j, o)| *i != j && s.overlaps(o))
        })
        .map(|(_, s)| *s)
        .collect()
}

/// Renders segments as an Audacity label track.
pub fn write_labels(segments: &[AnnotatedSegment]) -> String {
    let mut out = String::new();
    for s in segments {
        let _ = writeln!(out, "{:.6}\t{:.6}\t{}", s.start, s.end, s.label);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_single_line() {
        let t = parse_labels("0.50\t1.20\tinhalation\n").unwrap();
        assert_eq!(
            t.segments,
            vec![AnnotatedSegment {
                start: 0.5,
                end: 1.2,
                label: Class::Inhalation
            }]
        );
        assert!(t.warnings.is_empty());
    }

    #[test]
    fn end_before_start_is_error() {
        let err = parse_labels("1.0\t0.5\texhalation").unwrap_err();
        assert!(err.to_string().contains("end before start"));
    }

    #[test]
    fn output_is_sorted_by_start() {
        let t = parse_labels("2.0\t3.0\tnoise\n0.0\t1.0\tactuation\n").unwrap();
        assert_eq!(t.segments[0].label, Class::Actuation);
        assert_eq!(t.segments[1].label, Class::Noise);
    }

    #[test]
    fn rejects_unknown_label_and_bad_numbers() {
        assert!(parse_labels("0\t1\tcough").is_err());
        assert!(parse_labels("zero\t1\tnoise").is_err());
        assert!(parse_labels("0\t1").is_err());
    }

    #[test]
    fn skips_spectral_lines_and_flags_overlap() {
        let text = "0.0\t1.0\tnoise\n\\\t100\t2000\n0.5\t1.5\tinhalation\n2\t3\texhalation\n";
        let t = parse_labels(text).unwrap();
        assert_eq!(t.segments.len(), 3);
        assert_eq!(t.warnings.len(), 1);
        let clean = unambiguous_segments(&t.segments);
        assert_eq!(clean.len(), 1);
        assert_eq!(clean[0].label, Class::Exhalation);
    }

    #[test]
    fn write_parse_round_trip() {
        let segs = vec![
            AnnotatedSegment::new(0.125, 0.25, Class::Actuation).unwrap(),
            AnnotatedSegment::new(0.25, 1.0, Class::Inhalation).unwrap(),
        ];
        assert_eq!(parse_labels(&write_labels(&segs)).unwrap().segments, segs);
    }
}
