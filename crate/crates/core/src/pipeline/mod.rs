//! Batch commands: synthesize, extract, bench, detect and report.

mod config;

pub use config::RunConfig;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use sha2::{Digest, Sha256};

use crate::audio_io::{load_dataset, load_wav, write_labels, write_wav, BitDepth, Dataset, synthesize_dataset};
use crate::class::Class;
use crate::classifiers::{detect_actuation_cwt, ActuationEvent, DetectorConfig};
use crate::error::{Error, Result};
use crate::evaluation::{
    dataset_segments, evaluate, extract_corpus, plan_from_segments, time_benchmark, BenchmarkReport, ReportFormat,
    ReportRow,
};
use crate::features::{FeatureExtractor, FeatureKind};
use crate::framing::{frame_samples, Mixing};

/// Writes `dataset` below `dir` (WAV, label tracks and `manifest.json`) and
/// returns the manifest path.
pub fn write_dataset(dataset: &Dataset, dir: &Path, depth: BitDepth) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for ((wav, labels, _), lc) in dataset.manifest.entries.iter().zip(&dataset.clips) {
        let wav = dir.join(wav);
        let labels = dir.join(labels);
        if let Some(p) = wav.parent() {
            fs::create_dir_all(p).map_err(|e| Error::io(p, e))?;
        }
        write_wav(&wav, &lc.clip, depth)?;
        fs::write(&labels, write_labels(&lc.segments)).map_err(|e| Error::io(&labels, e))?;
    }
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&dataset.manifest.to_file())?;
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// The configured on-disk corpus, or the synthetic one.
pub fn load_corpus(cfg: &RunConfig) -> Result<Dataset> {
    match &cfg.dataset {
        Some(p) => load_dataset(p),
        None => synthesize_dataset(&cfg.synth),
    }
}

pub struct SynthOutput {
    pub manifest: PathBuf,
    /// SHA-256 over the manifest and every file it lists, in listing order.
    pub checksum: String,
}

/// Writes the synthetic corpus to `<out>/dataset`.
pub fn cmd_synth(cfg: &RunConfig) -> Result<SynthOutput> {
    cfg.seed()?;
    let ds = synthesize_dataset(&cfg.synth)?;
    let dir = cfg.out.join("dataset");
    let manifest = write_dataset(&ds, &dir, cfg.synth.bit_depth)?;
    let mut h = Sha256::new();
    h.update(fs::read(&manifest).map_err(|e| Error::io(&manifest, e))?);
    for (wav, labels, _) in &ds.manifest.entries {
        for p in [dir.join(wav), dir.join(labels)] {
            h.update(fs::read(&p).map_err(|e| Error::io(&p, e))?);
        }
    }
    Ok(SynthOutput {
        manifest,
        checksum: hex(&h.finalize()),
    })
}

#[derive(Debug, Default, PartialEq, Eq)]
pub struct ExtractSummary {
    pub written: Vec<PathBuf>,
    pub skipped: Vec<PathBuf>,
}

/// Writes one CSV feature file per clip and kind under
/// `<out>/features/<kind>/<subject>/<clip>.csv`. A clip is skipped when its
/// content hash (samples, labels, kind and feature settings) matches the
/// cache index from the previous run.
pub fn cmd_extract(cfg: &RunConfig) -> Result<ExtractSummary> {
    cfg.validate()?;
    let ds = load_corpus(cfg)?;
    let root = cfg.out.join("features");
    fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;
    let index_path = root.join("cache.json");
    let old: BTreeMap<String, String> = match fs::read_to_string(&index_path) {
        Ok(t) => serde_json::from_str(&t).unwrap_or_default(),
        Err(_) => BTreeMap::new(),
    };
    let settings = serde_json::to_string(&cfg.feature_config)?;
    let mut index = BTreeMap::new();
    let mut summary = ExtractSummary::default();
    for &kind in &cfg.features {
        for lc in &ds.clips {
            let clip = &lc.clip;
            let ex = FeatureExtractor::new(kind, clip.sample_rate(), &cfg.feature_config)?;
            let rel = format!("{}/{}/{}.csv", kind.name(), clip.subject_id, clip.clip_id);
            let path = root.join(&rel);
            let mut h = Sha256::new();
            h.update(kind.name());
            h.update(&settings);
            h.update(clip.sample_rate().to_le_bytes());
            clip.samples().iter().for_each(|s| h.update(s.to_le_bytes()));
            h.update(write_labels(&lc.segments));
            let key = hex(&h.finalize());
            if old.get(&rel) == Some(&key) && path.exists() {
                summary.skipped.push(path);
                index.insert(rel, key);
                continue;
            }
            let (series, mut m) = ex.extract_clip(clip)?;
            let labels: Option<Vec<Class>> = series
                .frame_times
                .iter()
                .map(|&t| lc.segments.iter().find(|s| s.contains(t)).map(|s| s.label))
                .collect();
            m.row_labels = labels;
            if let Some(p) = path.parent() {
                fs::create_dir_all(p).map_err(|e| Error::io(p, e))?;
            }
            let mut buf = Vec::new();
            m.write_csv(&mut buf).map_err(|e| Error::io(&path, e))?;
            fs::write(&path, buf).map_err(|e| Error::io(&path, e))?;
            summary.written.push(path);
            index.insert(rel, key);
        }
    }
    fs::write(&index_path, serde_json::to_string_pretty(&index)? + "\n").map_err(|e| Error::io(&index_path, e))?;
    Ok(summary)
}

/// Runs the classifier x feature x protocol x mixing grid.
pub fn run_bench(cfg: &RunConfig) -> Result<BenchmarkReport> {
    cfg.validate()?;
    let seed = cfg.seed()?;
    let ds = load_corpus(cfg)?;
    let fs_rate = ds
        .clips
        .first()
        .map(|c| c.clip.sample_rate())
        .ok_or_else(|| Error::invalid("corpus has no clips"))?;
    if ds.clips.iter().any(|c| c.clip.sample_rate() != fs_rate) {
        return Err(Error::invalid("all clips must share one sample rate"));
    }
    let segments = dataset_segments(&ds);
    let mut eval_cfg = cfg.eval.clone();
    eval_cfg.seed = seed;
    let mut report = BenchmarkReport::default();
    for &kind in &cfg.features {
        let ex = FeatureExtractor::new(kind, fs_rate, &cfg.feature_config)?;
        ex.warnings().iter().for_each(|w| log::warn!("{kind}: {w}"));
        let corpus = extract_corpus(&ds, &segments, &ex, cfg.window)?;
        corpus.warnings.iter().for_each(|w| log::warn!("{kind}: {w}"));
        let timings = if cfg.timing {
            let frames = raw_frames(&ds, &ex, cfg.timing_samples)?;
            let all: Vec<usize> = (0..segments.len()).collect();
            let (x, y) = corpus.gather(&all, Mixing::NonMixed);
            cfg.classifiers
                .iter()
                .map(|spec| {
                    let model = spec.fit(x.view(), &y, seed)?;
                    time_benchmark(&ex, &model, frames.view(), cfg.timing_samples).map(Some)
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            vec![None; cfg.classifiers.len()]
        };
        for &protocol in &cfg.protocols {
            let plan = plan_from_segments(segments.clone(), protocol, cfg.mixings[0], seed, cfg.folds)?;
            plan.warnings.iter().for_each(|w| log::warn!("{protocol}: {w}"));
            for (spec, timing) in cfg.classifiers.iter().zip(&timings) {
                log::info!("{} / {kind} / {protocol}", spec.name());
                for r in evaluate(&plan, &corpus, spec, &eval_cfg, &cfg.mixings)? {
                    report.push(ReportRow::from_result(spec.name(), kind.name(), &r, *timing));
                }
            }
        }
    }
    report.sort();
    Ok(report)
}

/// Runs the grid and writes `report.csv`, `report.txt`, `report.json`, the
/// accuracy and F1 pivot tables (and `timing.dat` when timing is on) under
/// `<out>`.
pub fn cmd_bench(cfg: &RunConfig) -> Result<BenchmarkReport> {
    let report = run_bench(cfg)?;
    fs::create_dir_all(&cfg.out).map_err(|e| Error::io(&cfg.out, e))?;
    for (name, fmt) in [
        ("report.csv", ReportFormat::Csv),
        ("report.txt", ReportFormat::Text),
        ("report.json", ReportFormat::Json),
    ] {
        let p = cfg.out.join(name);
        fs::write(&p, report.render(fmt)?).map_err(|e| Error::io(&p, e))?;
    }
    for (name, text) in [
        ("accuracy_table.csv", report.accuracy_table_csv()),
        ("f1_table.csv", report.f1_table_csv()),
    ] {
        let p = cfg.out.join(name);
        fs::write(&p, text).map_err(|e| Error::io(&p, e))?;
    }
    if cfg.timing {
        let p = cfg.out.join("timing.dat");
        fs::write(&p, report.timing_dat()).map_err(|e| Error::io(&p, e))?;
    }
    Ok(report)
}

/// Actuation events in one WAV file.
pub fn cmd_detect(cfg: &DetectorConfig, wav: &Path) -> Result<Vec<ActuationEvent>> {
    let clip = load_wav(wav)?;
    detect_actuation_cwt(clip.samples(), clip.sample_rate(), cfg)
}

/// Re-renders a saved `report.json`.
pub fn cmd_report(json: &Path, format: ReportFormat) -> Result<String> {
    let text = fs::read_to_string(json).map_err(|e| Error::io(json, e))?;
    let report: BenchmarkReport = serde_json::from_str(&text)?;
    report.render(format)
}

/// Up to `n` raw frames drawn from the start of the corpus.
fn raw_frames(ds: &Dataset, ex: &FeatureExtractor, n: usize) -> Result<Array2<f64>> {
    let mut rows: Vec<f64> = Vec::new();
    let mut count = 0;
    for lc in &ds.clips {
        if count >= n {
            break;
        }
        if lc.clip.len() < ex.frame_len() {
            continue;
        }
        let s = frame_samples(lc.clip.samples(), ex.sample_rate(), ex.frame_len(), ex.hop(), &lc.clip.clip_id)?;
        for r in s.frames.rows().into_iter().take(n - count) {
            rows.extend(r.iter());
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::invalid("no clip is long enough for one frame"));
    }
    Ok(Array2::from_shape_vec((count, ex.frame_len()), rows).expect("whole frames"))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Feature kinds as a comma list, for messages.
pub fn kind_list(kinds: &[FeatureKind]) -> String {
    kinds.iter().map(|k| k.name()).collect::<Vec<_>>().join(",")
}
