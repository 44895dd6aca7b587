//! Tabular benchmark output in CSV, plain text and JSON.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::evaluate::EvalResult;
use super::splits::Protocol;
use super::timing::StageTiming;
use crate::class::Class;
use crate::error::{Error, Result};
use crate::framing::Mixing;

pub const CSV_HEADER: &str =
    "mixing,classifier,feature,protocol,accuracy,drug_f1,exhale_f1,inhale_f1,noise_f1,feat_time_s,cls_time_s,sum_s";

/// Columns that receive top-3 highlights within each mixing and protocol.
pub const KPI_COLUMNS: [&str; 5] = ["accuracy", "drug_f1", "exhale_f1", "inhale_f1", "noise_f1"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Text,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "text" | "txt" => Ok(ReportFormat::Text),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::invalid(format!("unknown report format '{other}'"))),
        }
    }
}

/// One classifier/feature/protocol/mixing cell; percentages in `[0, 100]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub mixing: Mixing,
    pub classifier: String,
    pub feature: String,
    pub protocol: Protocol,
    pub accuracy: f64,
    /// Per class in `Class::ALL` order.
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    pub f1: Vec<f64>,
    pub timing: Option<StageTiming>,
}

impl ReportRow {
    pub fn from_result(classifier: &str, feature: &str, r: &EvalResult, timing: Option<StageTiming>) -> Self {
        let pct = |f: fn(&super::metrics::Metrics) -> f64| r.per_class.iter().map(|m| 100.0 * f(m)).collect();
        ReportRow {
            mixing: r.mixing,
            classifier: classifier.to_string(),
            feature: feature.to_string(),
            protocol: r.protocol,
            accuracy: 100.0 * r.accuracy,
            precision: pct(|m| m.precision),
            recall: pct(|m| m.recall),
            f1: pct(|m| m.f1),
            timing,
        }
    }

    fn kpi(&self, col: usize) -> f64 {
        if col == 0 {
            self.accuracy
        } else {
            self.f1[col - 1]
        }
    }

    fn key(&self) -> (Mixing, &str, &str, Protocol) {
        (self.mixing, &self.classifier, &self.feature, self.protocol)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub rows: Vec<ReportRow>,
}

/// Top-3 row indices of one KPI column within one mixing/protocol group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Highlight {
    pub mixing: Mixing,
    pub protocol: Protocol,
    pub column: String,
    pub rows: Vec<usize>,
}

impl BenchmarkReport {
    pub fn push(&mut self, row: ReportRow) {
        self.rows.push(row);
    }

    /// Sorts rows by mixing, classifier, feature and protocol.
    pub fn sort(&mut self) {
        self.rows.sort_by(|a, b| a.key().cmp(&b.key()));
    }

    /// Highest three values per KPI column in each group; ties keep row order.
    pub fn highlights(&self) -> Vec<Highlight> {
        let mut groups: BTreeMap<(Mixing, Protocol), Vec<usize>> = BTreeMap::new();
        for (i, r) in self.rows.iter().enumerate() {
            groups.entry((r.mixing, r.protocol)).or_default().push(i);
        }
        let mut out = Vec::new();
        for ((mixing, protocol), idx) in groups {
            for (c, name) in KPI_COLUMNS.iter().enumerate() {
                let mut ranked = idx.clone();
                ranked.sort_by(|&a, &b| self.rows[b].kpi(c).total_cmp(&self.rows[a].kpi(c)));
                ranked.truncate(3);
                out.push(Highlight {
                    mixing,
                    protocol,
                    column: name.to_string(),
                    rows: ranked,
                });
            }
        }
        out
    }

    pub fn render(&self, format: ReportFormat) -> Result<String> {
        if self.rows.is_empty() {
            return Err(Error::invalid("report has no rows"));
        }
        match format {
            ReportFormat::Csv => Ok(self.to_csv()),
            ReportFormat::Text => Ok(self.to_text()),
            ReportFormat::Json => Ok(serde_json::to_string_pretty(&JsonReport {
                rows: &self.rows,
                highlights: self.highlights(),
            })?),
        }
    }

    /// The fixed CSV schema. Timing cells stay empty for rows without timing,
    /// which keeps untimed reports byte-identical across runs.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = write!(s, "{},{},{},{},{:.2}", r.mixing.name(), r.classifier, r.feature, r.protocol, r.accuracy);
            for f in &r.f1 {
                let _ = write!(s, ",{f:.2}");
            }
            match r.timing {
                Some(t) => {
                    let _ = write!(s, ",{:.9},{:.9},{:.9}", t.feature_s, t.classify_s, t.sum_s());
                }
                None => s.push_str(",,,"),
            }
            s.push('\n');
        }
        s
    }

    /// Aligned table; `*` marks a top-3 accuracy in its group.
    pub fn to_text(&self) -> String {
        let top: Vec<usize> = self
            .highlights()
            .into_iter()
            .filter(|h| h.column == "accuracy")
            .flat_map(|h| h.rows)
            .collect();
        let mut s = String::new();
        let _ = write!(s, "{:<10} {:<5} {:<6} {:<10} {:>9}", "mixing", "cls", "feat", "protocol", "acc%");
        for c in Class::ALL {
            let _ = write!(s, " {:>9}", format!("{}_f1", c.report_tag()));
        }
        s.push('\n');
        for (i, r) in self.rows.iter().enumerate() {
            let mark = if top.contains(&i) { "*" } else { " " };
            let _ = write!(
                s,
                "{:<10} {:<5} {:<6} {:<10} {:>8.2}{mark}",
                r.mixing.name(),
                r.classifier,
                r.feature,
                r.protocol.name(),
                r.accuracy
            );
            for f in &r.f1 {
                let _ = write!(s, " {f:>9.2}");
            }
            s.push('\n');
        }
        s
    }

    /// Accuracy pivoted to one row per mixing, classifier and feature with a
    /// column per protocol, the usual layout for comparing protocols.
    pub fn accuracy_table_csv(&self) -> String {
        let mut s = String::from("mixing,classifier,feature,multi,single,loso\n");
        for ((m, c, f), cells) in self.pivot() {
            let _ = write!(s, "{},{c},{f}", m.name());
            for p in [Protocol::MultiSubj, Protocol::SingleSubj, Protocol::Loso] {
                s.push(',');
                if let Some(r) = cells.get(&p) {
                    let _ = write!(s, "{:.2}", r.accuracy);
                }
            }
            s.push('\n');
        }
        s
    }

    /// F1 pivoted into drug, exhale and inhale groups,
    /// each with LOSO, Multi and Single columns.
    pub fn f1_table_csv(&self) -> String {
        let order = [Protocol::Loso, Protocol::MultiSubj, Protocol::SingleSubj];
        let classes = [Class::Actuation, Class::Exhalation, Class::Inhalation];
        let mut s = String::from("mixing,classifier,feature");
        for c in classes {
            for p in order {
                let _ = write!(s, ",{}_{}", c.report_tag(), short(p));
            }
        }
        s.push('\n');
        for ((m, cl, f), cells) in self.pivot() {
            let _ = write!(s, "{},{cl},{f}", m.name());
            for c in classes {
                for p in order {
                    s.push(',');
                    if let Some(r) = cells.get(&p) {
                        let _ = write!(s, "{:.2}", r.f1[c.index()]);
                    }
                }
            }
            s.push('\n');
        }
        s
    }

    fn pivot(&self) -> BTreeMap<(Mixing, &str, &str), BTreeMap<Protocol, &ReportRow>> {
        let mut out: BTreeMap<_, BTreeMap<_, _>> = BTreeMap::new();
        for r in &self.rows {
            out.entry((r.mixing, r.classifier.as_str(), r.feature.as_str()))
                .or_default()
                .insert(r.protocol, r);
        }
        out
    }

    /// Whitespace-separated timing table for plotting; one line per timed
    /// classifier/feature pair.
    pub fn timing_dat(&self) -> String {
        let mut seen = BTreeMap::new();
        for r in &self.rows {
            if let Some(t) = r.timing {
                seen.entry((r.classifier.clone(), r.feature.clone())).or_insert(t);
            }
        }
        let mut s = String::from("# classifier feature feat_time_s cls_time_s sum_s\n");
        for ((c, f), t) in seen {
            let _ = writeln!(s, "{c} {f} {:.9} {:.9} {:.9}", t.feature_s, t.classify_s, t.sum_s());
        }
        s
    }
}

fn short(p: Protocol) -> &'static str {
    match p {
        Protocol::MultiSubj => "multi",
        Protocol::SingleSubj => "single",
        Protocol::Loso => "loso",
    }
}

#[derive(Serialize)]
struct JsonReport<'a> {
    rows: &'a [ReportRow],
    highlights: Vec<Highlight>,
}
