//! Settings resolution and the load → split → normalize → train path shared by
//! `train` and `grid`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use qbind::circuit::{AnsatzId, Encoding};
use qbind::data::{load_samples, split_train_test, synthetic_samples, MinMax, SampleSet};
use qbind::model::{Architecture, HybridModel};
use qbind::train::{evaluate_rmse, train_with_progress, EpochRecord, TrainConfig, TrainHistory};

use crate::cli::{CommonArgs, DataArgs, TrainingArgs};
use crate::config::{split_pair, CommonSection, DataSection, TrainingSection};
use crate::Failure;

/// Synthetic set size used when no training CSV is given; matches the size
/// of the small curated set the harness targets.
pub const DEFAULT_SYNTHETIC_SAMPLES: usize = 81;

pub struct Common {
    pub seed: u64,
    pub workers: usize,
    pub out: PathBuf,
}

impl Common {
    pub fn resolve(args: &CommonArgs, file: &CommonSection) -> Common {
        Common {
            seed: args.seed.or(file.seed).unwrap_or(0),
            workers: args.workers.or(file.workers).unwrap_or(0),
            out: args
                .out
                .clone()
                .or_else(|| file.out.clone())
                .unwrap_or_else(|| PathBuf::from(".")),
        }
    }

    pub fn ensure_out(&self) -> Result<&Path, Failure> {
        std::fs::create_dir_all(&self.out).map_err(|e| {
            Failure::Config(format!("cannot create output directory {}: {e}", self.out.display()))
        })?;
        Ok(&self.out)
    }

    pub fn pool(&self) -> Result<rayon::ThreadPool, Failure> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Failure::Config(format!("thread pool: {e}")))
    }
}

pub struct DataOptions {
    pub train: Option<PathBuf>,
    pub evals: Vec<(String, PathBuf)>,
    pub test_fraction: f64,
    pub synthetic: usize,
}

impl DataOptions {
    pub fn resolve(args: &DataArgs, file: &DataSection) -> Result<Self, Failure> {
        let train = args.data.clone().or_else(|| file.train.clone());
        let mut evals: Vec<(String, PathBuf)> = Vec::new();
        if args.evals.is_empty() {
            evals.extend(file.eval.iter().map(|(k, v)| (k.clone(), v.clone())));
        } else {
            for raw in &args.evals {
                let (name, path) = split_pair(raw);
                let path = PathBuf::from(path);
                let name = match name {
                    Some(n) => n.to_string(),
                    None => path
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .ok_or_else(|| Failure::Config(format!("cannot name evaluation set `{raw}`")))?,
                };
                evals.push((name, path));
            }
        }
        for (i, (name, _)) in evals.iter().enumerate() {
            if name.is_empty() || evals[..i].iter().any(|(n, _)| n == name) {
                return Err(Failure::Config(format!("evaluation set name `{name}` is empty or repeated")));
            }
            if name == "train" || name == "test" {
                return Err(Failure::Config(format!("evaluation set cannot be called `{name}`")));
            }
        }
        for path in train.iter().chain(evals.iter().map(|(_, p)| p)) {
            if !path.is_file() {
                return Err(Failure::Config(format!("no such file: {}", path.display())));
            }
        }
        Ok(DataOptions {
            train,
            evals,
            test_fraction: args.test_fraction.or(file.test_fraction).unwrap_or(0.2),
            synthetic: args
                .synthetic
                .or(file.synthetic_samples)
                .unwrap_or(DEFAULT_SYNTHETIC_SAMPLES),
        })
    }

    pub fn eval_names(&self) -> Vec<String> {
        self.evals.iter().map(|(n, _)| n.clone()).collect()
    }
}

/// Normalized train/test sides plus evaluation sets, all scaled with the
/// train side's min-max fit.
pub struct Datasets {
    pub train: SampleSet,
    pub test: SampleSet,
    pub evals: Vec<(String, SampleSet)>,
    pub normalization: MinMax,
}

pub fn load_datasets(opts: &DataOptions, seed: u64) -> Result<Datasets, Failure> {
    let full = match &opts.train {
        Some(p) => load_samples(p)?,
        None => synthetic_samples(opts.synthetic, seed)?,
    };
    let (train_raw, test_raw) = split_train_test(&full, opts.test_fraction, seed)?;
    let fit = MinMax::fit(&train_raw);
    let evals = opts
        .evals
        .iter()
        .map(|(name, path)| Ok((name.clone(), fit.apply(&load_samples(path)?))))
        .collect::<Result<_, Failure>>()?;
    Ok(Datasets {
        train: fit.apply(&train_raw),
        test: fit.apply(&test_raw),
        evals,
        normalization: fit,
    })
}

pub fn train_config(
    args: &TrainingArgs,
    file: &TrainingSection,
    seed: u64,
    test_fraction: f64,
) -> Result<TrainConfig, Failure> {
    let d = TrainConfig::default();
    let cfg = TrainConfig {
        epochs: args.epochs.or(file.epochs).unwrap_or(d.epochs),
        lr_init: args.lr_init.or(file.lr_init).unwrap_or(d.lr_init),
        lr_min: args.lr_min.or(file.lr_min).unwrap_or(d.lr_min),
        scheduler_patience: args
            .scheduler_patience
            .or(file.scheduler_patience)
            .unwrap_or(d.scheduler_patience),
        scheduler_factor: args
            .scheduler_factor
            .or(file.scheduler_factor)
            .unwrap_or(d.scheduler_factor),
        improvement_threshold: args
            .improvement_threshold
            .or(file.improvement_threshold)
            .unwrap_or(d.improvement_threshold),
        seed,
        test_fraction,
        // the caller's pool decides the thread count
        workers: 0,
    };
    cfg.validate()?;
    Ok(cfg)
}

pub struct Outcome {
    pub model: HybridModel,
    pub history: TrainHistory,
    pub eval_rmse: Vec<f64>,
    /// Wall-clock training time, excluding data loading and evaluation.
    pub seconds: f64,
}

/// Build, initialize from `cfg.seed`, train and evaluate one variant.
pub fn run_variant(
    architecture: Architecture,
    ansatz: AnsatzId,
    encoding: Encoding,
    data: &Datasets,
    cfg: &TrainConfig,
    progress: impl FnMut(&EpochRecord) + Send,
) -> qbind::Result<Outcome> {
    let mut model = HybridModel::build(architecture, ansatz, encoding)?;
    model.init_parameters(cfg.seed);
    let start = Instant::now();
    let (model, history) = train_with_progress(model, &data.train, &data.test, cfg, progress)?;
    let seconds = start.elapsed().as_secs_f64();
    let eval_rmse = data
        .evals
        .iter()
        .map(|(_, set)| evaluate_rmse(&model, set))
        .collect::<qbind::Result<_>>()?;
    Ok(Outcome {
        model,
        history,
        eval_rmse,
        seconds,
    })
}

/// Per-column `(min, max)` of the training fit.
pub fn write_normalization(fit: &MinMax, path: &Path) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path).map_err(qbind::Error::from)?;
    let io = |e: csv::Error| Failure::from(qbind::Error::from(e));
    w.write_record(["feature", "min", "max"]).map_err(io)?;
    for (i, (lo, hi)) in fit.min.iter().zip(&fit.max).enumerate() {
        w.write_record([format!("f{}", i + 1), lo.to_string(), hi.to_string()])
            .map_err(io)?;
    }
    w.flush().map_err(|e| Failure::from(qbind::Error::from(e)))?;
    Ok(())
}
