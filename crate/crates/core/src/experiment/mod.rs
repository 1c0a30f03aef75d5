//! End-to-end experiment protocol: split, preprocess, train, classify,
//! aggregate over repeats, and write reports.

mod pipeline;
mod report;

pub use pipeline::{
    compare, prepare_repeat, run_modes, run_pipeline, sweep, PreparedRepeat, PreparedView, SweepAxis,
};
pub use report::{emit_report, format_table, ReportFormat, RepeatRecord, RunReport, Summary, ViewHta};

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::data::{default_mfeat_dir, load_mfeat, synthesize_dataset, MultiViewDataset, SynthSpec};
use crate::error::{Error, Result};
use crate::trainer::TrainConfig;

/// Where the instances come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetSource {
    Mfeat { dir: PathBuf },
    Synthetic {
        views: usize,
        classes: usize,
        per_class: usize,
        dim: usize,
        seed: u64,
    },
}

impl DatasetSource {
    pub fn load(&self) -> Result<MultiViewDataset> {
        match self {
            DatasetSource::Mfeat { dir } => load_mfeat(dir),
            DatasetSource::Synthetic {
                views,
                classes,
                per_class,
                dim,
                seed,
            } => synthesize_dataset(&SynthSpec::new(*views, *classes, *per_class, *dim, *seed)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Quantum,
    Classical,
}

/// One evaluated configuration: kernel family, whether Stage 1 runs, and
/// which view (`None` for the multi-view combination).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mode {
    pub kernel: KernelKind,
    pub trained: bool,
    pub view: Option<String>,
}

impl Mode {
    pub fn quantum(trained: bool, view: Option<&str>) -> Self {
        Self {
            kernel: KernelKind::Quantum,
            trained,
            view: view.map(str::to_string),
        }
    }

    pub fn classical(view: Option<&str>) -> Self {
        Self {
            kernel: KernelKind::Classical,
            trained: false,
            view: view.map(str::to_string),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match (self.kernel, self.trained) {
            (KernelKind::Quantum, true) => "quantum-trained",
            (KernelKind::Quantum, false) => "quantum-untrained",
            (KernelKind::Classical, _) => "classical",
        };
        match &self.view {
            Some(v) => write!(f, "{kind}/{v}"),
            None => write!(f, "{kind}/multi-view"),
        }
    }
}

/// Fully resolved run configuration; echoed into every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    pub train: TrainConfig,
    pub depth: usize,
    pub svm_c: f64,
    pub repeats: usize,
    pub seed: u64,
    pub train_per_class: usize,
    pub test_per_class: usize,
    pub pca_dim: usize,
    pub mode: Mode,
    pub out: Option<PathBuf>,
    pub format: ReportFormat,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset: DatasetSource::Mfeat {
                dir: default_mfeat_dir(),
            },
            train: TrainConfig::default(),
            depth: 6,
            svm_c: 1.0,
            repeats: 20,
            seed: 0,
            train_per_class: 40,
            test_per_class: 40,
            pca_dim: 6,
            mode: Mode::quantum(true, None),
            out: None,
            format: ReportFormat::Csv,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| Error::InvalidConfig(format!("{key} = {value:?}: {e}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::InvalidConfig(format!("{key} = {value:?}: expected true/false"))),
    }
}

impl ExperimentConfig {
    /// The synthetic dataset used for quick runs: 2 classes, 3 views of
    /// dimension 3, 40 instances per class, split 20/20 per class, P = 2.
    pub fn synthetic_default() -> Self {
        Self {
            dataset: DatasetSource::Synthetic {
                views: 3,
                classes: 2,
                per_class: 40,
                dim: 3,
                seed: 0,
            },
            depth: 2,
            repeats: 3,
            train_per_class: 20,
            test_per_class: 20,
            ..Self::default()
        }
    }

    /// Applies one `key = value` setting. Keys match the long CLI flags
    /// without the leading dashes.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        let v = value.trim();
        match key {
            "dataset-dir" => self.dataset = DatasetSource::Mfeat { dir: PathBuf::from(v) },
            "synthetic" => {
                if parse_bool(key, v)? {
                    // The split must fit the preset, so it comes along.
                    let base = Self::synthetic_default();
                    self.dataset = base.dataset;
                    self.train_per_class = base.train_per_class;
                    self.test_per_class = base.test_per_class;
                }
            }
            "synth-views" | "synth-classes" | "synth-per-class" | "synth-dim" | "synth-seed" => {
                let DatasetSource::Synthetic {
                    views,
                    classes,
                    per_class,
                    dim,
                    seed,
                } = &mut self.dataset
                else {
                    return Err(Error::InvalidConfig(format!("{key} requires synthetic = true")));
                };
                match key {
                    "synth-views" => *views = parse(key, v)?,
                    "synth-classes" => *classes = parse(key, v)?,
                    "synth-per-class" => *per_class = parse(key, v)?,
                    "synth-dim" => *dim = parse(key, v)?,
                    _ => *seed = parse(key, v)?,
                }
            }
            "mode" => {
                self.mode.kernel = match v {
                    "quantum" => KernelKind::Quantum,
                    "classical" => KernelKind::Classical,
                    _ => return Err(Error::InvalidConfig(format!("unknown mode {v:?}"))),
                };
                if self.mode.kernel == KernelKind::Classical {
                    self.mode.trained = false;
                }
            }
            "trained" => self.mode.trained = parse_bool(key, v)?,
            "view" => {
                self.mode.view = match v {
                    "" | "multi" | "multi-view" => None,
                    name => Some(name.to_string()),
                }
            }
            "lambda" => self.train.lambda = parse(key, v)?,
            "k" => {
                self.train.k1 = parse(key, v)?;
                self.train.k2 = self.train.k1;
            }
            "k1" => self.train.k1 = parse(key, v)?,
            "k2" => self.train.k2 = parse(key, v)?,
            "lr" => self.train.learning_rate = parse(key, v)?,
            "t1" => self.train.t1 = parse(key, v)?,
            "t2" => self.train.t2 = parse(key, v)?,
            "eps1" => self.train.eps1 = parse(key, v)?,
            "eps2" => self.train.eps2 = parse(key, v)?,
            "batch" => self.train.batch_size = parse(key, v)?,
            "anchor" => {
                self.train.anchor_policy = match v {
                    "include" => crate::alignment::AnchorPolicy::Include,
                    "exclude" => crate::alignment::AnchorPolicy::Exclude,
                    _ => return Err(Error::InvalidConfig(format!("unknown anchor policy {v:?}"))),
                }
            }
            "depth" => self.depth = parse(key, v)?,
            "svm-c" => self.svm_c = parse(key, v)?,
            "repeats" => self.repeats = parse(key, v)?,
            "seed" => self.seed = parse(key, v)?,
            "train-per-class" => self.train_per_class = parse(key, v)?,
            "test-per-class" => self.test_per_class = parse(key, v)?,
            "pca-dim" => self.pca_dim = parse(key, v)?,
            "out" => self.out = Some(PathBuf::from(v)),
            "format" => self.format = v.parse()?,
            _ => return Err(Error::InvalidConfig(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies a config file body: `key = value` lines, `#` comments.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line {}: expected key = value", i + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut c = Self::default();
        c.apply_text(text)?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        self.train.validate()?;
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.repeats == 0 {
            return bad("repeats must be at least 1".into());
        }
        if self.depth == 0 {
            return bad("circuit depth must be at least 1".into());
        }
        if !(self.svm_c > 0.0 && self.svm_c.is_finite()) {
            return bad(format!("svm C {} must be positive", self.svm_c));
        }
        if self.pca_dim == 0 {
            return bad("pca dimension must be at least 1".into());
        }
        if self.mode.kernel == KernelKind::Classical && self.mode.trained {
            return bad("classical kernels have no trainable parameters".into());
        }
        self.train.validate_for(2 * self.train_per_class)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_overrides() {
        let c = ExperimentConfig::from_text(
            "# comment\nlambda = 0.5\nk = 6\ndepth=3\nmode = classical\nview = FOU\nformat = jsonl\n",
        )
        .unwrap();
        assert_eq!(c.train.lambda, 0.5);
        assert_eq!((c.train.k1, c.train.k2), (6, 6));
        assert_eq!(c.depth, 3);
        assert_eq!(c.mode, Mode::classical(Some("FOU")));
        assert_eq!(c.format, ReportFormat::Jsonl);
        assert!(c.validate().is_ok());
        assert!(ExperimentConfig::from_text("bogus = 1").is_err());
        assert!(ExperimentConfig::from_text("lambda").is_err());
        assert!(ExperimentConfig::from_text("synth-dim = 4").is_err());
    }

    #[test]
    fn validation() {
        let mut c = ExperimentConfig::default();
        assert!(c.validate().is_ok());
        c.repeats = 0;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default();
        c.mode = Mode { kernel: KernelKind::Classical, trained: true, view: None };
        assert!(c.validate().is_err());
    }
}
