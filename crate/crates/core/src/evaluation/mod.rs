//! Cross-validation protocols, metrics, timing and report rendering.

mod corpus;
mod evaluate;
pub mod metrics;
mod report;
mod splits;
mod timing;

pub use corpus::{extract_corpus, CorpusFeatures, SegmentExamples};
pub use evaluate::{evaluate, evaluate_with, AccuracyMode, EvalConfig, EvalResult, FoldOutcome, Predictor};
pub use metrics::{metrics, BinaryCounts, ConfusionMatrix, Metrics};
pub use report::{BenchmarkReport, Highlight, ReportFormat, ReportRow, CSV_HEADER, KPI_COLUMNS};
pub use splits::{dataset_segments, make_splits, plan_from_segments, Fold, Protocol, SegmentRef, SplitPlan};
pub use timing::{median, time_benchmark, StageTiming};
