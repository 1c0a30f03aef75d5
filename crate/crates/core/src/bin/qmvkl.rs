use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qmvkl::data::write_dataset;
use qmvkl::experiment::{
    compare, emit_report, format_table, prepare_repeat, run_pipeline, sweep, ExperimentConfig,
    RunReport, SweepAxis,
};
use qmvkl::{Error, Result};

#[derive(Parser)]
#[command(name = "qmvkl", version, about = "Multi-view quantum kernel learning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration over all repeats.
    Run(Common),
    /// Repeat a run for each value of one hyperparameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// lambda, k or depth.
        #[arg(long)]
        axis: String,
        /// Comma-separated values, e.g. 0,0.0625,0.125.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Quantum trained/untrained and classical, multi-view and per view.
    Compare(Common),
    /// Write the preprocessed split of one repeat.
    Preprocess {
        #[command(flatten)]
        common: Common,
        /// Repeat index whose split is written.
        #[arg(long, default_value_t = 0)]
        repeat: usize,
    },
}

#[derive(Args)]
struct Common {
    /// key = value configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, env = "QMVKL_MFEAT_DIR")]
    dataset_dir: Option<PathBuf>,
    /// Use the built-in synthetic dataset.
    #[arg(long)]
    synthetic: bool,
    /// quantum or classical.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long, conflicts_with = "untrained")]
    trained: bool,
    #[arg(long)]
    untrained: bool,
    /// Evaluate a single view.
    #[arg(long, conflicts_with = "multi_view")]
    view: Option<String>,
    #[arg(long)]
    multi_view: bool,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    k1: Option<usize>,
    #[arg(long)]
    k2: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    svm_c: Option<f64>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    t1: Option<usize>,
    #[arg(long)]
    t2: Option<usize>,
    #[arg(long)]
    eps1: Option<f64>,
    #[arg(long)]
    eps2: Option<f64>,
    #[arg(long)]
    batch: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or jsonl.
    #[arg(long)]
    format: Option<String>,
}

impl Common {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut c = if self.synthetic {
            ExperimentConfig::synthetic_default()
        } else {
            ExperimentConfig::default()
        };
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            c.apply_text(&text)?;
        }
        let mut set = |k: &str, v: Option<String>| -> Result<()> {
            match v {
                Some(v) => c.set(k, &v),
                None => Ok(()),
            }
        };
        let s = |v: &Option<PathBuf>| v.as_ref().map(|p| p.display().to_string());
        if !self.synthetic {
            set("dataset-dir", s(&self.dataset_dir))?;
        }
        set("mode", self.mode.clone())?;
        set("trained", self.trained.then(|| "true".into()))?;
        set("trained", self.untrained.then(|| "false".into()))?;
        set("view", self.view.clone())?;
        set("view", self.multi_view.then(|| "multi-view".into()))?;
        set("lambda", self.lambda.map(|v| v.to_string()))?;
        set("k1", self.k1.map(|v| v.to_string()))?;
        set("k2", self.k2.map(|v| v.to_string()))?;
        set("depth", self.depth.map(|v| v.to_string()))?;
        set("repeats", self.repeats.map(|v| v.to_string()))?;
        set("seed", self.seed.map(|v| v.to_string()))?;
        set("svm-c", self.svm_c.map(|v| v.to_string()))?;
        set("lr", self.lr.map(|v| v.to_string()))?;
        set("t1", self.t1.map(|v| v.to_string()))?;
        set("t2", self.t2.map(|v| v.to_string()))?;
        set("eps1", self.eps1.map(|v| v.to_string()))?;
        set("eps2", self.eps2.map(|v| v.to_string()))?;
        set("batch", self.batch.map(|v| v.to_string()))?;
        set("out", s(&self.out))?;
        set("format", self.format.clone())?;
        c.validate()?;
        Ok(c)
    }
}

fn finish(config: &ExperimentConfig, reports: &[RunReport]) -> Result<()> {
    print!("{}", format_table(reports));
    if let Some(dir) = &config.out {
        emit_report(reports, dir, config.format)?;
        eprintln!("reports written to {}", dir.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(common) => {
            let c = common.resolve()?;
            let r = run_pipeline(&c)?;
            finish(&c, &[r])
        }
        Command::Compare(common) => {
            let c = common.resolve()?;
            let rs = compare(&c)?;
            finish(&c, &rs)
        }
        Command::Sweep {
            common,
            axis,
            values,
        } => {
            let c = common.resolve()?;
            let rs = sweep(&c, axis.parse::<SweepAxis>()?, &values)?;
            finish(&c, &rs)
        }
        Command::Preprocess { common, repeat } => {
            let c = common.resolve()?;
            let dir = c
                .out
                .clone()
                .ok_or_else(|| Error::InvalidConfig("preprocess needs --out".into()))?;
            let dataset = c.dataset.load()?;
            let prep = prepare_repeat(&dataset, &c, repeat)?;
            let labels = |idx: &[usize]| idx.iter().map(|&i| dataset.labels()[i]).collect::<Vec<_>>();
            for (part, idx) in [("train", &prep.train_idx), ("test", &prep.test_idx)] {
                let views = prep
                    .views
                    .iter()
                    .map(|v| {
                        let rows = if part == "train" { v.train.clone() } else { v.test.clone() };
                        qmvkl::data::View::new(v.name.clone(), rows)
                    })
                    .collect::<Result<Vec<_>>>()?;
                write_dataset(&views, &labels(idx), &dir.join(part))?;
            }
            eprintln!("preprocessed split written to {}", dir.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
