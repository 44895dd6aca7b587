use std::path::Path;
use std::process::{Command, Output};

use rda_core::audio_io::{write_wav, AudioClip, BitDepth};

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rda-bench"))
        .args(args)
        .env("RDA_BENCH_JOBS", "1")
        .output()
        .expect("spawn rda-bench")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn wav(path: &Path, samples: Vec<f64>) {
    let clip = AudioClip::new(samples, 8000, "s", "c").unwrap();
    write_wav(path, &clip, BitDepth::Sixteen).unwrap();
}

// 2 s of low tone with a 3 kHz burst centred at 1 s.
fn burst() -> Vec<f64> {
    let fs = 8000.0;
    let tau = std::f64::consts::TAU;
    let mut state = 12345u32;
    (0..16000)
        .map(|i| {
            state = state.wrapping_mul(1664525).wrapping_add(1013904223);
            let jitter = (state >> 8) as f64 / (1u32 << 24) as f64 - 0.5;
            let t = i as f64 / fs;
            let mut v = 0.05 * (tau * 600.0 * t).sin() + 0.01 * jitter;
            if (0.94..1.06).contains(&t) {
                v += 0.3 * (tau * 3000.0 * t).sin() * (1.0 + 0.3 * jitter);
            }
            v
        })
        .collect()
}

const SMALL: &str = r#"
seed = 4
features = ["cepst"]
protocols = ["loso"]
mixings = ["non-mixed"]

[synth]
subjects = 2
clips_per_subject = 3

[[classifiers]]
type = "qda"
"#;

#[test]
fn detect_silence_prints_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("quiet.wav");
    wav(&p, vec![0.0; 8000]);
    let o = bench(&["detect", p.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    assert_eq!(stdout(&o), "");
}

#[test]
fn detect_single_burst() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("puff.wav");
    wav(&p, burst());
    let o = bench(&["detect", "--format", "csv", p.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2, "{text}");
    assert_eq!(lines[0], "time_s,peak");
    let t: f64 = lines[1].split(',').next().unwrap().parse().unwrap();
    assert!((t - 1.0).abs() < 0.05, "{t}");
}

#[test]
fn missing_input_fails() {
    let o = bench(&["detect", "/nonexistent/nothing.wav"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.toml");
    std::fs::write(&p, "seed = 1\nwindow_length = 3\n").unwrap();
    let o = bench(&["--config", p.to_str().unwrap(), "synth"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("window_length"));
}

#[test]
fn missing_seed_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = bench(&["--out", dir.path().to_str().unwrap(), "synth"]);
    assert!(!o.status.success());
}

#[test]
fn synth_extract_bench() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, SMALL).unwrap();
    let out = dir.path().join("out");
    let base = ["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];

    let a = bench(&[&base[..], &["synth"]].concat());
    assert!(a.status.success(), "{a:?}");
    assert!(stdout(&a).contains("sha256 "));
    let b = bench(&[&base[..], &["--seed", "4", "synth"]].concat());
    assert_eq!(stdout(&a), stdout(&b));

    let e = bench(&[&base[..], &["extract", "--features", "mfcc,volume"]].concat());
    assert!(e.status.success(), "{e:?}");
    assert!(stdout(&e).starts_with("12 written"), "{}", stdout(&e));
    assert!(out.join("features/mfcc").is_dir());

    let r = bench(&[&base[..], &["--format", "csv", "bench"]].concat());
    assert!(r.status.success(), "{r:?}");
    let csv = stdout(&r);
    assert!(csv.starts_with("mixing,classifier,feature,protocol,accuracy"));
    assert_eq!(csv.lines().count(), 2);

    let j = bench(&["--format", "csv", "report", out.join("report.json").to_str().unwrap()]);
    assert_eq!(stdout(&j), csv);
}
