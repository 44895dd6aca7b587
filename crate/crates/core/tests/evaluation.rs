use rda_core::audio_io::{synthesize_dataset, SynthSpec};
use rda_core::classifiers::ClassifierSpec;
use rda_core::evaluation::{
    dataset_segments, evaluate, extract_corpus, make_splits, AccuracyMode, EvalConfig, Protocol,
};
use rda_core::features::{FeatureConfig, FeatureExtractor, FeatureKind};
use rda_core::framing::{Mixing, WindowConfig};
use rda_core::Class;

fn small() -> rda_core::audio_io::Dataset {
    synthesize_dataset(&SynthSpec {
        seed: 5,
        subjects: 3,
        clips_per_subject: 4,
        ..SynthSpec::default()
    })
    .unwrap()
}

#[test]
fn every_segment_lands_in_exactly_one_test_fold() {
    let ds = small();
    for p in Protocol::ALL {
        let plan = make_splits(&ds, p, Mixing::NonMixed, 1, 5).unwrap();
        let mut seen = vec![0; plan.segments.len()];
        for f in &plan.folds {
            for &i in &f.test {
                seen[i] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1), "{p}");
    }
}

#[test]
fn mixed_examples_cover_boundary_frames() {
    let ds = small();
    let segs = dataset_segments(&ds);
    let ex = FeatureExtractor::new(FeatureKind::Cepst, 8000, &FeatureConfig::default()).unwrap();
    let w = WindowConfig { window_len: 1, step: 1 };
    let corpus = extract_corpus(&ds, &segs, &ex, w).unwrap();
    let non_mixed: usize = corpus.examples.iter().map(|e| e.non_mixed.nrows()).sum();
    let mixed: usize = corpus.examples.iter().map(|e| e.mixed.nrows()).sum();
    // Whole-recording framing labels every frame, including those that
    // straddle a boundary, so it yields more examples than per-segment framing.
    assert!(mixed > non_mixed, "{mixed} vs {non_mixed}");
    for (s, e) in corpus.segments.iter().zip(&corpus.examples) {
        if s.label == Class::Actuation {
            assert!(e.non_mixed.nrows() >= 1);
        }
    }
}

#[test]
fn wide_windows_starve_short_segments() {
    let ds = small();
    let segs = dataset_segments(&ds);
    let ex = FeatureExtractor::new(FeatureKind::Volume, 8000, &FeatureConfig::default()).unwrap();
    let corpus = extract_corpus(&ds, &segs, &ex, WindowConfig::default()).unwrap();
    let act: usize = corpus
        .segments
        .iter()
        .zip(&corpus.examples)
        .filter(|(s, _)| s.label == Class::Actuation)
        .map(|(_, e)| e.non_mixed.nrows())
        .sum();
    assert_eq!(act, 0);
    assert!(!corpus.warnings.is_empty());
}

#[test]
fn end_to_end_loso_and_multi() {
    let ds = small();
    let segs = dataset_segments(&ds);
    let ex = FeatureExtractor::new(FeatureKind::Mfcc, 8000, &FeatureConfig::default()).unwrap();
    let corpus = extract_corpus(&ds, &segs, &ex, WindowConfig { window_len: 1, step: 1 }).unwrap();
    let spec = ClassifierSpec::from_name("rf").unwrap();
    let cfg = EvalConfig { seed: 3, ..EvalConfig::default() };
    for p in [Protocol::MultiSubj, Protocol::Loso] {
        let plan = make_splits(&ds, p, Mixing::NonMixed, 3, 5).unwrap();
        let r = evaluate(&plan, &corpus, &spec, &cfg, &[Mixing::NonMixed, Mixing::Mixed]).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r[0].accuracy > 0.9, "{p}: {}", r[0].accuracy);
        assert!(r[1].confusion.total() > r[0].confusion.total());
        let again = evaluate(&plan, &corpus, &spec, &cfg, &[Mixing::NonMixed, Mixing::Mixed]).unwrap();
        assert_eq!(r, again);
        let fm = EvalConfig { accuracy: AccuracyMode::FoldMean, ..cfg.clone() };
        let f = evaluate(&plan, &corpus, &spec, &fm, &[Mixing::NonMixed]).unwrap();
        assert_eq!(f[0].confusion, r[0].confusion);
    }
}

#[test]
fn loso_needs_two_subjects() {
    let ds = synthesize_dataset(&SynthSpec {
        subjects: 1,
        clips_per_subject: 3,
        ..SynthSpec::default()
    })
    .unwrap();
    assert!(make_splits(&ds, Protocol::Loso, Mixing::Mixed, 0, 5).is_err());
}
