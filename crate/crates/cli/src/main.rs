//! `rda-bench`: synthesize corpora, extract features, run the benchmark grid,
//! detect actuations and re-render reports.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rda_core::classifiers::ActuationEvent;
use rda_core::evaluation::ReportFormat;
use rda_core::features::FeatureKind;
use rda_core::pipeline::{self, RunConfig};

#[derive(Parser)]
#[command(name = "rda-bench", version, about = "Respiratory and drug-actuation sound classification benchmark")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "RDA_BENCH_JOBS")]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Text,
    Json,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => ReportFormat::Csv,
            Format::Text => ReportFormat::Text,
            Format::Json => ReportFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write the synthetic corpus (WAV, labels, manifest) to <out>/dataset.
    Synth,
    /// Write per-clip feature CSVs to <out>/features.
    Extract {
        /// Comma-separated feature kinds; overrides the config.
        #[arg(long, value_delimiter = ',')]
        features: Option<Vec<String>>,
    },
    /// Run the classifier x feature x protocol x mixing grid.
    Bench {
        /// Add per-segment timing columns.
        #[arg(long)]
        timing: bool,
    },
    /// Print actuation events found in a WAV file.
    Detect { wav: PathBuf },
    /// Re-render a saved report.json.
    Report { json: PathBuf },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .context("configuring worker threads")?;
    }
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p).with_context(|| format!("loading {}", p.display()))?,
        None => RunConfig::default(),
    };
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    let format = ReportFormat::from(cli.format);

    match cli.command {
        Command::Synth => {
            let out = pipeline::cmd_synth(&cfg)?;
            println!("{}", out.manifest.display());
            println!("sha256 {}", out.checksum);
        }
        Command::Extract { features } => {
            if let Some(list) = features {
                cfg.features = list
                    .iter()
                    .map(|s| s.parse::<FeatureKind>())
                    .collect::<rda_core::Result<_>>()?;
            }
            let s = pipeline::cmd_extract(&cfg)?;
            println!(
                "{} written, {} unchanged ({})",
                s.written.len(),
                s.skipped.len(),
                pipeline::kind_list(&cfg.features)
            );
        }
        Command::Bench { timing } => {
            cfg.timing |= timing;
            let report = pipeline::cmd_bench(&cfg)?;
            print!("{}", report.render(format)?);
        }
        Command::Detect { wav } => {
            let events = pipeline::cmd_detect(&cfg.detector, &wav)?;
            print!("{}", render_events(&events, format)?);
        }
        Command::Report { json } => print!("{}", pipeline::cmd_report(&json, format)?),
    }
    Ok(())
}

fn render_events(events: &[ActuationEvent], format: ReportFormat) -> Result<String> {
    Ok(match format {
        ReportFormat::Json => serde_json::to_string_pretty(events)? + "\n",
        ReportFormat::Csv => {
            let mut s = String::from("time_s,peak\n");
            for e in events {
                s += &format!("{:.4},{:.4}\n", e.time, e.peak);
            }
            s
        }
        ReportFormat::Text => events.iter().map(|e| format!("{:.4}\n", e.time)).collect(),
    })
}
