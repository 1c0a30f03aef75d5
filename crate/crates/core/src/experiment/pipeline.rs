use std::collections::HashMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::report::{RepeatRecord, RunReport, ViewHta};
use super::{ExperimentConfig, KernelKind, Mode};
use crate::alignment::{hybrid_alignment, knn_by_distance, TargetKernel};
use crate::data::{balanced_split, pca_reduce, scale_features, MultiViewDataset, SplitSpec};
use crate::error::{Error, Result};
use crate::kernel::{
    combine_kernels, cross_kernel_matrix, gaussian_cross_kernel, gaussian_kernel_matrix,
    quantum_kernel_matrix, KernelMatrix,
};
use crate::qsim::AnsatzParams;
use crate::svm::{accuracy, svm_fit, svm_predict, SvmParams};
use crate::trainer::{train_base_kernel, train_weights, WeightVector};

/// One view after splitting, PCA and scaling.
#[derive(Clone, Debug)]
pub struct PreparedView {
    pub name: String,
    pub train: Vec<Vec<f64>>,
    pub test: Vec<Vec<f64>>,
}

/// Everything a repeat needs before any kernel is built.
#[derive(Clone, Debug)]
pub struct PreparedRepeat {
    pub repeat: usize,
    pub seed: u64,
    pub train_idx: Vec<usize>,
    pub test_idx: Vec<usize>,
    pub y_train: Vec<i8>,
    pub y_test: Vec<i8>,
    pub views: Vec<PreparedView>,
    pub class_counts_train: Vec<usize>,
    pub class_counts_test: Vec<usize>,
}

/// Splits with seed `base + repeat`, then fits PCA and scaling on the
/// training rows of each view.
pub fn prepare_repeat(dataset: &MultiViewDataset, config: &ExperimentConfig, repeat: usize) -> Result<PreparedRepeat> {
    let seed = config.seed.wrapping_add(repeat as u64);
    let labels = dataset.binary_labels();
    let spec = SplitSpec {
        train_per_class: config.train_per_class,
        test_per_class: config.test_per_class,
        seed,
    };
    let (train_idx, test_idx) = balanced_split(&labels, &spec)?;
    let mut views = Vec::with_capacity(dataset.num_views());
    for v in dataset.views() {
        let dim = config.pca_dim.min(v.dim());
        // A training subset can be rank deficient (MOR's integer-valued
        // features satisfy exact linear relations on some subsets); keep
        // only the directions the subset spans.
        let (reduced, _) = match pca_reduce(&v.rows, dim, &train_idx) {
            Err(Error::RankDeficient { rank, .. }) if rank > 0 => {
                log::warn!("view {} repeat {repeat}: training rank {rank} < {dim}, reducing to {rank}", v.name);
                pca_reduce(&v.rows, rank, &train_idx)?
            }
            other => other?,
        };
        let (scaled, _) = scale_features(&reduced, &train_idx)?;
        views.push(PreparedView {
            name: v.name.clone(),
            train: train_idx.iter().map(|&i| scaled[i].clone()).collect(),
            test: test_idx.iter().map(|&i| scaled[i].clone()).collect(),
        });
    }
    let counts = |idx: &[usize]| {
        let mut c = vec![0; dataset.num_classes()];
        for &i in idx {
            c[dataset.labels()[i] as usize] += 1;
        }
        c
    };
    Ok(PreparedRepeat {
        repeat,
        seed,
        y_train: train_idx.iter().map(|&i| labels[i]).collect(),
        y_test: test_idx.iter().map(|&i| labels[i]).collect(),
        class_counts_train: counts(&train_idx),
        class_counts_test: counts(&test_idx),
        train_idx,
        test_idx,
        views,
    })
}

/// Random initial circuit parameters for a view; identical across modes
/// sharing a repeat seed.
fn initial_params(seed: u64, view: usize, depth: usize) -> Result<AnsatzParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(view as u64 + 1);
    AnsatzParams::random(depth, &mut rng)
}

/// Per-view train/test kernels and alignment summary for one family.
struct ViewKernels {
    train: KernelMatrix,
    test: KernelMatrix,
    hta: ViewHta,
}

struct RepeatCache<'a> {
    prep: &'a PreparedRepeat,
    config: &'a ExperimentConfig,
    entries: HashMap<(KernelKind, bool, usize), ViewKernels>,
}

impl<'a> RepeatCache<'a> {
    fn get(&mut self, kind: KernelKind, trained: bool, view: usize) -> Result<&ViewKernels> {
        let key = (kind, trained, view);
        if !self.entries.contains_key(&key) {
            let vk = self.build(kind, trained, view)?;
            self.entries.insert(key, vk);
        }
        Ok(&self.entries[&key])
    }

    fn build(&self, kind: KernelKind, trained: bool, view: usize) -> Result<ViewKernels> {
        let pv = &self.prep.views[view];
        let cfg = &self.config.train;
        let stage1_cfg = crate::trainer::TrainConfig {
            seed: self.prep.seed,
            ..cfg.clone()
        };
        match kind {
            KernelKind::Classical => {
                let (train, sigma) = gaussian_kernel_matrix(&pv.train)?;
                let test = gaussian_cross_kernel(&pv.test, &pv.train, sigma)?;
                let h = view_hta(&pv.train, &train, &self.prep.y_train, cfg)?;
                Ok(ViewKernels {
                    train,
                    test,
                    hta: ViewHta {
                        name: pv.name.clone(),
                        initial: h,
                        trained: h,
                        trace: Vec::new(),
                        params: vec![sigma],
                    },
                })
            }
            KernelKind::Quantum => {
                let init = initial_params(self.prep.seed, view, self.config.depth)?;
                if trained {
                    let s1 = train_base_kernel(&pv.train, &self.prep.y_train, &init, &stage1_cfg, view as u64)?;
                    let test = cross_kernel_matrix(&pv.test, &pv.train, &s1.params)?;
                    Ok(ViewKernels {
                        hta: ViewHta {
                            name: pv.name.clone(),
                            initial: s1.initial_hta(),
                            trained: s1.final_hta,
                            trace: s1.trace.clone(),
                            params: s1.params.to_vec(),
                        },
                        train: s1.kernel,
                        test,
                    })
                } else {
                    let train = quantum_kernel_matrix(&pv.train, &init)?;
                    let test = cross_kernel_matrix(&pv.test, &pv.train, &init)?;
                    let h = view_hta(&pv.train, &train, &self.prep.y_train, cfg)?;
                    Ok(ViewKernels {
                        train,
                        test,
                        hta: ViewHta {
                            name: pv.name.clone(),
                            initial: h,
                            trained: h,
                            trace: Vec::new(),
                            params: init.to_vec(),
                        },
                    })
                }
            }
        }
    }
}

fn view_hta(x: &[Vec<f64>], k: &KernelMatrix, y: &[i8], cfg: &crate::trainer::TrainConfig) -> Result<f64> {
    let nb = knn_by_distance(x, cfg.k1, cfg.anchor_policy)?;
    hybrid_alignment(k, &TargetKernel::new(y)?, &nb, cfg.lambda)
}

fn view_indices(prep: &PreparedRepeat, mode: &Mode) -> Result<Vec<usize>> {
    match &mode.view {
        None => Ok((0..prep.views.len()).collect()),
        Some(name) => prep
            .views
            .iter()
            .position(|v| v.name.eq_ignore_ascii_case(name))
            .map(|i| vec![i])
            .ok_or_else(|| Error::InvalidConfig(format!("unknown view {name:?}"))),
    }
}

fn evaluate(cache: &mut RepeatCache<'_>, mode: &Mode) -> Result<RepeatRecord> {
    let prep = cache.prep;
    let config = cache.config;
    let idx = view_indices(prep, mode)?;
    let mut train = Vec::with_capacity(idx.len());
    let mut test = Vec::with_capacity(idx.len());
    let mut views = Vec::with_capacity(idx.len());
    for &v in &idx {
        let vk = cache.get(mode.kernel, mode.trained, v)?;
        train.push(vk.train.clone());
        test.push(vk.test.clone());
        views.push(vk.hta.clone());
    }
    let stage2_cfg = crate::trainer::TrainConfig {
        seed: prep.seed,
        ..config.train.clone()
    };
    let s2 = train_weights(&train, &prep.y_train, &WeightVector::uniform(train.len())?, &stage2_cfg)?;
    let test_kernel = combine_kernels(&test, s2.eta())?;
    let model = svm_fit(&s2.kernel, &prep.y_train, &SvmParams::with_c(config.svm_c))?;
    let test_pred = svm_predict(&model, &test_kernel)?;
    let train_pred = svm_predict(&model, &s2.kernel)?;
    Ok(RepeatRecord {
        repeat: prep.repeat,
        seed: prep.seed,
        accuracy: 100.0 * accuracy(&test_pred, &prep.y_test)?,
        train_accuracy: 100.0 * accuracy(&train_pred, &prep.y_train)?,
        eta: s2.eta().to_vec(),
        combined_hta: s2.final_hta,
        stage2_trace: s2.trace.clone(),
        views,
        class_counts_train: prep.class_counts_train.clone(),
        class_counts_test: prep.class_counts_test.clone(),
    })
}

/// Runs every mode on the same splits. Stage 1 runs at most once per view
/// and repeat, shared by all trained modes.
pub fn run_modes(dataset: &MultiViewDataset, config: &ExperimentConfig, modes: &[Mode]) -> Result<Vec<RunReport>> {
    config.validate()?;
    if modes.is_empty() {
        return Err(Error::EmptyInput);
    }
    for m in modes {
        if m.kernel == KernelKind::Classical && m.trained {
            return Err(Error::InvalidConfig("classical kernels have no trainable parameters".into()));
        }
    }
    let mut records: Vec<Vec<RepeatRecord>> = vec![Vec::new(); modes.len()];
    let mut timings: Vec<Vec<f64>> = vec![Vec::new(); modes.len()];
    for r in 0..config.repeats {
        let wrap = |e: Error| Error::Repeat {
            index: r,
            source: Box::new(e),
        };
        let prep = prepare_repeat(dataset, config, r).map_err(wrap)?;
        let mut cache = RepeatCache {
            prep: &prep,
            config,
            entries: HashMap::new(),
        };
        for (i, m) in modes.iter().enumerate() {
            let start = Instant::now();
            let rec = evaluate(&mut cache, m).map_err(wrap)?;
            timings[i].push(start.elapsed().as_secs_f64());
            log::info!("repeat {r} {m}: accuracy {:.2}%", rec.accuracy);
            records[i].push(rec);
        }
    }
    Ok(modes
        .iter()
        .zip(records)
        .zip(timings)
        .map(|((m, recs), t)| {
            let mut c = config.clone();
            c.mode = m.clone();
            RunReport::new(c, None, recs, t)
        })
        .collect())
}

/// Runs the configured mode.
pub fn run_pipeline(config: &ExperimentConfig) -> Result<RunReport> {
    let dataset = config.dataset.load()?;
    let mut reports = run_modes(&dataset, config, &[config.mode.clone()])?;
    Ok(reports.remove(0))
}

/// Quantum trained and untrained, and classical, each multi-view and per
/// view, on shared splits.
pub fn compare(config: &ExperimentConfig) -> Result<Vec<RunReport>> {
    let dataset = config.dataset.load()?;
    let names = dataset.names();
    let mut modes = vec![
        Mode::quantum(true, None),
        Mode::quantum(false, None),
        Mode::classical(None),
    ];
    for n in &names {
        modes.push(Mode::quantum(true, Some(n)));
        modes.push(Mode::quantum(false, Some(n)));
        modes.push(Mode::classical(Some(n)));
    }
    run_modes(&dataset, config, &modes)
}

/// Hyperparameter varied by [`sweep`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    Lambda,
    /// Sets both neighbour counts.
    K,
    Depth,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Lambda => "lambda",
            SweepAxis::K => "k",
            SweepAxis::Depth => "depth",
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lambda" => Ok(SweepAxis::Lambda),
            "k" => Ok(SweepAxis::K),
            "depth" | "P" | "p" => Ok(SweepAxis::Depth),
            _ => Err(Error::InvalidConfig(format!("unknown sweep axis {s:?}"))),
        }
    }
}

/// One run per axis value with the configured mode and seed base.
pub fn sweep(config: &ExperimentConfig, axis: SweepAxis, values: &[f64]) -> Result<Vec<RunReport>> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let dataset = config.dataset.load()?;
    let mut out = Vec::with_capacity(values.len());
    for &v in values {
        let mut c = config.clone();
        match axis {
            SweepAxis::Lambda => c.train.lambda = v,
            SweepAxis::K | SweepAxis::Depth => {
                if !(v >= 1.0 && v.fract() == 0.0) {
                    return Err(Error::InvalidConfig(format!("{} must be a positive integer, got {v}", axis.name())));
                }
                if axis == SweepAxis::K {
                    c.train.k1 = v as usize;
                    c.train.k2 = v as usize;
                } else {
                    c.depth = v as usize;
                }
            }
        }
        let mut r = run_modes(&dataset, &c, &[c.mode.clone()])?.remove(0);
        r.axis = Some((axis.name().to_string(), v));
        out.push(r);
    }
    Ok(out)
}
