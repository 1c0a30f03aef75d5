//! Run reports and their on-disk forms.
//!
//! `emit_report` writes, in the output directory:
//!
//! - `summary.csv` / `summary.jsonl`: one row per report with columns
//!   `mode, view, axis, axis_value, repeats, mean_accuracy, std_accuracy,
//!   mean_combined_hta, mean_eta, views, mean_initial_hta, mean_trained_hta`;
//! - `repeats.csv` / `repeats.jsonl`: one row per repeat with columns
//!   `mode, view, axis, axis_value, repeat, seed, accuracy, train_accuracy,
//!   combined_hta, eta, views, initial_hta, trained_hta`;
//! - `config.json`: the resolved configuration of every report;
//! - `timings.csv`: wall-clock seconds per repeat (not deterministic).
//!
//! Accuracies are percentages, alignments are raw values in `[-1, 1]`.
//! List-valued CSV cells are `;`-separated. Numbers use the shortest
//! representation that round-trips.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{ExperimentConfig, KernelKind};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Jsonl,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "jsonl" | "json-lines" => Ok(ReportFormat::Jsonl),
            _ => Err(Error::InvalidConfig(format!("unknown report format {s:?}"))),
        }
    }
}

/// Alignment of one view's kernel before and after Stage 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViewHta {
    pub name: String,
    pub initial: f64,
    pub trained: f64,
    /// Stage-1 HTA trace (empty when Stage 1 did not run).
    pub trace: Vec<f64>,
    /// Final circuit parameters, or the Gaussian bandwidth.
    pub params: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepeatRecord {
    pub repeat: usize,
    pub seed: u64,
    pub accuracy: f64,
    pub train_accuracy: f64,
    pub eta: Vec<f64>,
    pub combined_hta: f64,
    pub stage2_trace: Vec<f64>,
    pub views: Vec<ViewHta>,
    pub class_counts_train: Vec<usize>,
    pub class_counts_test: Vec<usize>,
}

/// Aggregates over repeats; the standard deviation uses `R - 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub mean_combined_hta: f64,
    pub mean_eta: Vec<f64>,
    pub views: Vec<String>,
    pub mean_initial_hta: Vec<f64>,
    pub mean_trained_hta: Vec<f64>,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sample_std(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

impl Summary {
    pub fn from_repeats(repeats: &[RepeatRecord]) -> Self {
        let acc: Vec<f64> = repeats.iter().map(|r| r.accuracy).collect();
        let hta: Vec<f64> = repeats.iter().map(|r| r.combined_hta).collect();
        let m = repeats.first().map_or(0, |r| r.eta.len());
        let col = |f: &dyn Fn(&RepeatRecord, usize) -> f64, q: usize| {
            mean(&repeats.iter().map(|r| f(r, q)).collect::<Vec<_>>())
        };
        Self {
            mean_accuracy: mean(&acc),
            std_accuracy: sample_std(&acc),
            mean_combined_hta: mean(&hta),
            mean_eta: (0..m).map(|q| col(&|r, q| r.eta[q], q)).collect(),
            views: repeats
                .first()
                .map(|r| r.views.iter().map(|v| v.name.clone()).collect())
                .unwrap_or_default(),
            mean_initial_hta: (0..m).map(|q| col(&|r, q| r.views[q].initial, q)).collect(),
            mean_trained_hta: (0..m).map(|q| col(&|r, q| r.views[q].trained, q)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    /// Sweep axis name and value, if the report is part of a sweep.
    pub axis: Option<(String, f64)>,
    pub repeats: Vec<RepeatRecord>,
    pub summary: Summary,
    /// Seconds per repeat; excluded from the serialized report.
    #[serde(skip)]
    pub timings: Vec<f64>,
}

impl RunReport {
    pub fn new(
        config: ExperimentConfig,
        axis: Option<(String, f64)>,
        repeats: Vec<RepeatRecord>,
        timings: Vec<f64>,
    ) -> Self {
        let summary = Summary::from_repeats(&repeats);
        Self {
            config,
            axis,
            repeats,
            summary,
            timings,
        }
    }

    pub fn mode_label(&self) -> String {
        let m = &self.config.mode;
        match (m.kernel, m.trained) {
            (KernelKind::Quantum, true) => "quantum-trained",
            (KernelKind::Quantum, false) => "quantum-untrained",
            (KernelKind::Classical, _) => "classical",
        }
        .to_string()
    }

    pub fn view_label(&self) -> String {
        self.config.mode.view.clone().unwrap_or_else(|| "multi-view".into())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    fn axis_cells(&self) -> (String, String) {
        match &self.axis {
            Some((n, v)) => (n.clone(), v.to_string()),
            None => (String::new(), String::new()),
        }
    }
}

fn join_f(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(";")
}

fn join_s(v: &[String]) -> String {
    v.join(";")
}

const SUMMARY_HEADER: &str = "mode,view,axis,axis_value,repeats,mean_accuracy,std_accuracy,mean_combined_hta,mean_eta,views,mean_initial_hta,mean_trained_hta";
const REPEAT_HEADER: &str = "mode,view,axis,axis_value,repeat,seed,accuracy,train_accuracy,combined_hta,eta,views,initial_hta,trained_hta";

fn summary_csv(reports: &[RunReport]) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    for r in reports {
        let s = &r.summary;
        let (an, av) = r.axis_cells();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.mode_label(),
            r.view_label(),
            an,
            av,
            r.repeats.len(),
            s.mean_accuracy,
            s.std_accuracy,
            s.mean_combined_hta,
            join_f(&s.mean_eta),
            join_s(&s.views),
            join_f(&s.mean_initial_hta),
            join_f(&s.mean_trained_hta)
        );
    }
    out
}

fn repeats_csv(reports: &[RunReport]) -> String {
    let mut out = format!("{REPEAT_HEADER}\n");
    for r in reports {
        let (an, av) = r.axis_cells();
        for p in &r.repeats {
            let names: Vec<String> = p.views.iter().map(|v| v.name.clone()).collect();
            let init: Vec<f64> = p.views.iter().map(|v| v.initial).collect();
            let trained: Vec<f64> = p.views.iter().map(|v| v.trained).collect();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.mode_label(),
                r.view_label(),
                an,
                av,
                p.repeat,
                p.seed,
                p.accuracy,
                p.train_accuracy,
                p.combined_hta,
                join_f(&p.eta),
                join_s(&names),
                join_f(&init),
                join_f(&trained)
            );
        }
    }
    out
}

fn summary_jsonl(reports: &[RunReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let s = &r.summary;
        let (an, _) = r.axis_cells();
        let row = json!({
            "mode": r.mode_label(),
            "view": r.view_label(),
            "axis": an,
            "axis_value": r.axis.as_ref().map(|a| a.1),
            "repeats": r.repeats.len(),
            "mean_accuracy": s.mean_accuracy,
            "std_accuracy": s.std_accuracy,
            "mean_combined_hta": s.mean_combined_hta,
            "mean_eta": s.mean_eta,
            "views": s.views,
            "mean_initial_hta": s.mean_initial_hta,
            "mean_trained_hta": s.mean_trained_hta,
        });
        let _ = writeln!(out, "{row}");
    }
    out
}

fn repeats_jsonl(reports: &[RunReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let (an, _) = r.axis_cells();
        for p in &r.repeats {
            let row = json!({
                "mode": r.mode_label(),
                "view": r.view_label(),
                "axis": an,
                "axis_value": r.axis.as_ref().map(|a| a.1),
                "repeat": p.repeat,
                "seed": p.seed,
                "accuracy": p.accuracy,
                "train_accuracy": p.train_accuracy,
                "combined_hta": p.combined_hta,
                "eta": p.eta,
                "views": p.views.iter().map(|v| v.name.clone()).collect::<Vec<_>>(),
                "initial_hta": p.views.iter().map(|v| v.initial).collect::<Vec<_>>(),
                "trained_hta": p.views.iter().map(|v| v.trained).collect::<Vec<_>>(),
            });
            let _ = writeln!(out, "{row}");
        }
    }
    out
}

fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(&tmp, e))?;
    f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Writes the summary, per-repeat, configuration and timing files into
/// `dir`.
pub fn emit_report(reports: &[RunReport], dir: &Path, format: ReportFormat) -> Result<()> {
    if reports.is_empty() {
        return Err(Error::EmptyInput);
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    match format {
        ReportFormat::Csv => {
            write_atomic(&dir.join("summary.csv"), &summary_csv(reports))?;
            write_atomic(&dir.join("repeats.csv"), &repeats_csv(reports))?;
        }
        ReportFormat::Jsonl => {
            write_atomic(&dir.join("summary.jsonl"), &summary_jsonl(reports))?;
            write_atomic(&dir.join("repeats.jsonl"), &repeats_jsonl(reports))?;
        }
    }
    let configs: Vec<_> = reports
        .iter()
        .map(|r| json!({"mode": r.mode_label(), "view": r.view_label(), "axis": r.axis, "config": r.config}))
        .collect();
    let text = serde_json::to_string_pretty(&configs).map_err(|e| Error::Parse(e.to_string()))?;
    write_atomic(&dir.join("config.json"), &(text + "\n"))?;
    let mut t = String::from("mode,view,repeat,seconds\n");
    for r in reports {
        for (i, s) in r.timings.iter().enumerate() {
            let _ = writeln!(t, "{},{},{},{}", r.mode_label(), r.view_label(), i, s);
        }
    }
    write_atomic(&dir.join("timings.csv"), &t)
}

/// Human-readable table: accuracy and combined HTA in percent, two
/// decimals.
pub fn format_table(reports: &[RunReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<18} {:<11} {:>14} {:>18} {:>12}  eta",
        "mode", "view", "axis", "accuracy (%)", "HTA (%)"
    );
    for r in reports {
        let s = &r.summary;
        let axis = r.axis.as_ref().map(|(n, v)| format!("{n}={v}")).unwrap_or_default();
        let eta: Vec<String> = s.mean_eta.iter().map(|e| format!("{e:.3}")).collect();
        let _ = writeln!(
            out,
            "{:<18} {:<11} {:>14} {:>8.2} ± {:<7.2} {:>12.2}  {}",
            r.mode_label(),
            r.view_label(),
            axis,
            s.mean_accuracy,
            s.std_accuracy,
            100.0 * s.mean_combined_hta,
            eta.join(" ")
        );
    }
    out
}
