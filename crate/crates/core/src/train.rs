//! Full-batch gradient descent with a reduce-on-plateau learning rate.
//!
//! Every epoch computes the mean gradient of `½(ŷ − y)²` over the whole
//! training set at the current parameters and takes one step. Ensemble members
//! train on their own disjoint subsets, each with its own scheduler.
//!
//! History row `e` describes the parameters at the start of epoch `e`, so
//! row 0 is the untrained model and the learning rate shown is the one used
//! for that epoch's step. A run of `n` epochs has `n` rows; the metrics of
//! the returned model are kept alongside them.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use crate::data::{partition_ensemble_subsets, rmse, SampleSet};
use crate::error::{Error, Result};
use crate::model::{Architecture, HybridModel};

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub lr_init: f64,
    pub scheduler_patience: usize,
    pub scheduler_factor: f64,
    pub lr_min: f64,
    /// Minimum drop in train RMSE that counts as an improvement.
    pub improvement_threshold: f64,
    pub seed: u64,
    pub test_fraction: f64,
    /// Worker threads for per-sample gradients; 0 uses the ambient rayon pool.
    pub workers: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 300,
            lr_init: 0.01,
            scheduler_patience: 20,
            scheduler_factor: 0.5,
            lr_min: 1e-5,
            improvement_threshold: 1e-4,
            seed: 0,
            test_fraction: 0.2,
            workers: 0,
        }
    }
}

impl TrainConfig {
    /// `lr_init = 0` is accepted and freezes the model; otherwise
    /// `lr_init ≥ lr_min > 0` is required.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::config(m));
        if self.epochs == 0 {
            return bad("epochs must be positive".into());
        }
        if !(self.lr_min > 0.0 && self.lr_min.is_finite()) {
            return bad(format!("lr_min must be positive, got {}", self.lr_min));
        }
        if !self.lr_init.is_finite() || self.lr_init < 0.0 {
            return bad(format!("lr_init must be finite and non-negative, got {}", self.lr_init));
        }
        if self.lr_init != 0.0 && self.lr_init < self.lr_min {
            return bad(format!(
                "lr_init {} is below lr_min {}",
                self.lr_init, self.lr_min
            ));
        }
        if !(self.scheduler_factor > 0.0 && self.scheduler_factor < 1.0) {
            return bad(format!(
                "scheduler_factor must lie in (0, 1), got {}",
                self.scheduler_factor
            ));
        }
        if !(self.improvement_threshold >= 0.0 && self.improvement_threshold.is_finite()) {
            return bad(format!(
                "improvement_threshold must be non-negative, got {}",
                self.improvement_threshold
            ));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return bad(format!("test_fraction must lie in (0, 1), got {}", self.test_fraction));
        }
        Ok(())
    }
}

/// Reduce-on-plateau on a metric where smaller is better.
#[derive(Clone, Debug)]
pub struct PlateauScheduler {
    lr: f64,
    floor: f64,
    factor: f64,
    patience: usize,
    threshold: f64,
    best: f64,
    stale: usize,
}

impl PlateauScheduler {
    pub fn new(cfg: &TrainConfig) -> Self {
        PlateauScheduler {
            lr: cfg.lr_init,
            // a zero start never climbs to lr_min
            floor: cfg.lr_min.min(cfg.lr_init),
            factor: cfg.scheduler_factor,
            patience: cfg.scheduler_patience,
            threshold: cfg.improvement_threshold,
            best: f64::INFINITY,
            stale: 0,
        }
    }

    pub fn lr(&self) -> f64 {
        self.lr
    }

    /// Feed one metric value; returns the learning rate to use next.
    pub fn observe(&mut self, metric: f64) -> f64 {
        if metric < self.best - self.threshold {
            self.best = metric;
            self.stale = 0;
        } else {
            self.stale += 1;
            if self.stale > self.patience {
                self.lr = (self.lr * self.factor).max(self.floor);
                self.stale = 0;
            }
        }
        self.lr
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_rmse: f64,
    /// `None` when no test set was supplied.
    pub test_rmse: Option<f64>,
    pub lr: f64,
    pub elapsed_s: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainHistory {
    /// One row per epoch, describing the parameters that epoch started from.
    pub records: Vec<EpochRecord>,
    /// Metrics of the returned, fully trained model.
    pub final_train_rmse: f64,
    pub final_test_rmse: Option<f64>,
    pub total_seconds: f64,
}

impl TrainHistory {
    pub fn final_record(&self) -> Option<&EpochRecord> {
        self.records.last()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["epoch", "train_rmse", "test_rmse", "lr", "elapsed_s"])?;
        for r in &self.records {
            w.write_record([
                r.epoch.to_string(),
                r.train_rmse.to_string(),
                r.test_rmse.map(|v| v.to_string()).unwrap_or_default(),
                r.lr.to_string(),
                format!("{:.6}", r.elapsed_s),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_to(&self, mut out: impl std::io::Write) -> Result<()> {
        writeln!(out, "epoch,train_rmse,test_rmse,lr,elapsed_s")?;
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{:.6}",
                r.epoch,
                r.train_rmse,
                r.test_rmse.map(|v| v.to_string()).unwrap_or_default(),
                r.lr,
                r.elapsed_s
            )?;
        }
        Ok(())
    }
}

/// Predictions for every sample, computed in parallel and returned in order.
pub fn predict(model: &HybridModel, set: &SampleSet) -> Result<Vec<f64>> {
    set.features.par_iter().map(|x| model.forward(x)).collect()
}

pub fn evaluate_rmse(model: &HybridModel, set: &SampleSet) -> Result<f64> {
    rmse(&predict(model, set)?, &set.targets)
}

/// Mean gradient of the loss over `set`, and the RMSE at the current parameters.
/// Per-sample terms are summed in index order, so the result does not depend
/// on the thread count.
pub fn batch_gradient(model: &HybridModel, set: &SampleSet) -> Result<(f64, Vec<f64>)> {
    if set.is_empty() {
        return Err(Error::config("cannot take a gradient over an empty set"));
    }
    let terms: Vec<(f64, Vec<f64>)> = set
        .features
        .par_iter()
        .zip(set.targets.par_iter())
        .map(|(x, &t)| model.backward(x, t).map(|(l, g)| (l, g.0)))
        .collect::<Result<_>>()?;
    let n = set.len() as f64;
    let mut grad = vec![0.0; model.param_count()];
    let mut sse = 0.0;
    for (loss, g) in &terms {
        sse += 2.0 * loss;
        for (a, b) in grad.iter_mut().zip(g) {
            *a += b;
        }
    }
    grad.iter_mut().for_each(|g| *g /= n);
    Ok(((sse / n).sqrt(), grad))
}

/// The disjoint training subsets ensemble members see under seed `seed`.
pub fn ensemble_partition(train: &SampleSet, members: usize, seed: u64) -> Result<Vec<SampleSet>> {
    partition_ensemble_subsets(train, members, seed ^ 0x5eed_e45e)
}

fn tag_epoch(epoch: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Numerical(m) => Error::Numerical(format!("epoch {epoch}: {m}")),
        other => other,
    }
}

fn step(params: &mut [f64], grad: &[f64], lr: f64) {
    for (p, g) in params.iter_mut().zip(grad) {
        *p -= lr * g;
    }
}

/// Train `model` on `train` and return it with its history; `test` may be empty.
pub fn train(
    model: HybridModel,
    train: &SampleSet,
    test: &SampleSet,
    cfg: &TrainConfig,
) -> Result<(HybridModel, TrainHistory)> {
    train_with_progress(model, train, test, cfg, |_| {})
}

/// Like [`train`], calling `progress` after each history row is recorded.
pub fn train_with_progress(
    model: HybridModel,
    train: &SampleSet,
    test: &SampleSet,
    cfg: &TrainConfig,
    mut progress: impl FnMut(&EpochRecord) + Send,
) -> Result<(HybridModel, TrainHistory)> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(Error::config("training set is empty"));
    }
    if cfg.workers == 0 {
        return run(model, train, test, cfg, &mut progress);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::config(format!("thread pool: {e}")))?;
    pool.install(|| run(model, train, test, cfg, &mut progress))
}

fn run(
    mut model: HybridModel,
    train: &SampleSet,
    test: &SampleSet,
    cfg: &TrainConfig,
    progress: &mut (dyn FnMut(&EpochRecord) + Send),
) -> Result<(HybridModel, TrainHistory)> {
    let start = Instant::now();
    let ensemble = model.architecture() == Architecture::Ensemble;
    // (member model, its training subset); a single unit for the other layouts
    let mut units: Vec<(HybridModel, SampleSet)> = if ensemble {
        ensemble_partition(train, model.n_members(), cfg.seed)?
            .into_iter()
            .enumerate()
            .map(|(i, s)| Ok((model.member(i)?, s)))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let n_sched = if ensemble { units.len() } else { 1 };
    let mut schedulers = vec![PlateauScheduler::new(cfg); n_sched];
    let mut history = TrainHistory::default();

    for epoch in 0..cfg.epochs {
        let wrap = tag_epoch(epoch);
        if ensemble {
            let train_rmse = evaluate_rmse(&model, train).map_err(&wrap)?;
            let mut steps = Vec::with_capacity(units.len());
            for ((member, subset), sched) in units.iter().zip(&mut schedulers) {
                let (sub_rmse, grad) = batch_gradient(member, subset).map_err(&wrap)?;
                steps.push((sched.observe(sub_rmse), grad));
            }
            let lr = steps.iter().map(|(lr, _)| lr).sum::<f64>() / steps.len() as f64;
            let test_rmse = eval_optional(&model, test).map_err(&wrap)?;
            push(&mut history, epoch, train_rmse, test_rmse, lr, &start, progress);
            for (i, ((member, _), (lr, grad))) in units.iter_mut().zip(&steps).enumerate() {
                step(member.params_mut(), grad, *lr);
                model.set_member(i, member)?;
            }
        } else {
            let (train_rmse, grad) = batch_gradient(&model, train).map_err(&wrap)?;
            let lr = schedulers[0].observe(train_rmse);
            let test_rmse = eval_optional(&model, test).map_err(&wrap)?;
            push(&mut history, epoch, train_rmse, test_rmse, lr, &start, progress);
            step(model.params_mut(), &grad, lr);
        }
    }
    let wrap = tag_epoch(cfg.epochs);
    history.final_train_rmse = evaluate_rmse(&model, train).map_err(&wrap)?;
    history.final_test_rmse = eval_optional(&model, test).map_err(&wrap)?;
    history.total_seconds = start.elapsed().as_secs_f64();
    Ok((model, history))
}

fn eval_optional(model: &HybridModel, set: &SampleSet) -> Result<Option<f64>> {
    if set.is_empty() {
        Ok(None)
    } else {
        evaluate_rmse(model, set).map(Some)
    }
}

fn push(
    history: &mut TrainHistory,
    epoch: usize,
    train_rmse: f64,
    test_rmse: Option<f64>,
    lr: f64,
    start: &Instant,
    progress: &mut (dyn FnMut(&EpochRecord) + Send),
) {
    history.records.push(EpochRecord {
        epoch,
        train_rmse,
        test_rmse,
        lr,
        elapsed_s: start.elapsed().as_secs_f64(),
    });
    progress(history.records.last().expect("just pushed"));
}
