//! Grid runner and report writers.
//!
//! Per-architecture reports (`sequential.csv`, `parallel.csv`, `ensemble.csv`)
//! hold one row per variant and repetition:
//!
//! `architecture,ansatz,encoding,repetition,train_rmse,test_rmse,<set>_rmse...,parameters,train_seconds,status`
//!
//! `summary.csv` lists the baseline and, per architecture, the variant with
//! the lowest mean test RMSE, followed by `<set>_improvement_pct` columns
//! `(baseline − model) / baseline · 100` wherever a baseline value exists.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use qbind::circuit::reference::BASELINE_RMSE;
use qbind::circuit::{AnsatzId, Encoding};
use qbind::model::{Architecture, HybridModel};
use qbind::train::TrainConfig;
use rayon::prelude::*;

use crate::cli::GridArgs;
use crate::config::{parse_ids, split_pair, FileConfig};
use crate::pipeline::{load_datasets, run_variant, train_config, Common, DataOptions, Datasets};
use crate::Failure;

#[derive(Clone, Copy, Debug)]
struct Job {
    architecture: Architecture,
    ansatz: AnsatzId,
    encoding: Encoding,
    repetition: usize,
}

#[derive(Debug)]
struct Row {
    job: Job,
    parameters: Option<usize>,
    train_rmse: Option<f64>,
    test_rmse: Option<f64>,
    eval_rmse: Vec<Option<f64>>,
    seconds: Option<f64>,
    status: String,
}

impl Row {
    fn ok(&self) -> bool {
        self.status == "ok"
    }
}

fn pick<T: Copy + std::str::FromStr<Err = qbind::Error>>(
    what: &str,
    flag: &Option<Vec<T>>,
    file: &Option<Vec<String>>,
    all: &[T],
) -> Result<Vec<T>, Failure> {
    let v = match (flag, file) {
        (Some(v), _) => v.clone(),
        (None, Some(raw)) => parse_ids(what, raw)?,
        (None, None) => all.to_vec(),
    };
    if v.is_empty() {
        return Err(Failure::Config(format!("no {what} selected")));
    }
    Ok(v)
}

fn baseline(args: &GridArgs, file: &FileConfig) -> Result<BTreeMap<String, f64>, Failure> {
    let mut map: BTreeMap<String, f64> = BASELINE_RMSE.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    for (k, v) in &file.grid.baseline {
        map.insert(k.to_lowercase(), *v);
    }
    for raw in &args.baseline {
        let (Some(k), v) = split_pair(raw) else {
            return Err(Failure::Config(format!("baseline `{raw}` is not NAME=VALUE")));
        };
        let v: f64 = v
            .parse()
            .map_err(|_| Failure::Config(format!("baseline `{raw}`: not a number")))?;
        map.insert(k.to_lowercase(), v);
    }
    if let Some((k, v)) = map.iter().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
        return Err(Failure::Config(format!("baseline {k} must be positive, got {v}")));
    }
    Ok(map)
}

fn construct(job: Job, n_evals: usize) -> Row {
    let built = HybridModel::build(job.architecture, job.ansatz, job.encoding);
    Row {
        job,
        parameters: built.as_ref().ok().map(HybridModel::param_count),
        train_rmse: None,
        test_rmse: None,
        eval_rmse: vec![None; n_evals],
        seconds: None,
        status: match built {
            Ok(_) => "constructed".into(),
            Err(e) => format!("failed: {e}"),
        },
    }
}

fn execute(job: Job, data: &Datasets, base: &TrainConfig) -> Row {
    let cfg = TrainConfig {
        seed: base.seed.wrapping_add(job.repetition as u64),
        ..base.clone()
    };
    let attempt = catch_unwind(AssertUnwindSafe(|| {
        run_variant(job.architecture, job.ansatz, job.encoding, data, &cfg, |_| {})
    }));
    let mut row = construct(job, data.evals.len());
    match attempt {
        Ok(Ok(o)) => {
            row.train_rmse = Some(o.history.final_train_rmse);
            row.test_rmse = o.history.final_test_rmse;
            row.eval_rmse = o.eval_rmse.into_iter().map(Some).collect();
            row.seconds = Some(o.seconds);
            row.status = "ok".into();
        }
        Ok(Err(e)) => row.status = format!("failed: {e}"),
        Err(_) => row.status = "failed: panic during training".into(),
    }
    row
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_err(e: csv::Error) -> Failure {
    Failure::from(qbind::Error::from(e))
}

fn write_report(path: &Path, rows: &[&Row], eval_names: &[String]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    let mut head: Vec<String> = ["architecture", "ansatz", "encoding", "repetition", "train_rmse", "test_rmse"]
        .map(String::from)
        .to_vec();
    head.extend(eval_names.iter().map(|n| format!("{n}_rmse")));
    head.extend(["parameters", "train_seconds", "status"].map(String::from));
    w.write_record(&head).map_err(csv_err)?;
    for r in rows {
        let mut rec = vec![
            r.job.architecture.to_string(),
            r.job.ansatz.to_string(),
            r.job.encoding.to_string(),
            r.job.repetition.to_string(),
            opt(r.train_rmse),
            opt(r.test_rmse),
        ];
        rec.extend(r.eval_rmse.iter().map(|v| opt(*v)));
        rec.push(r.parameters.map(|p| p.to_string()).unwrap_or_default());
        rec.push(r.seconds.map(|s| format!("{s:.3}")).unwrap_or_default());
        rec.push(r.status.clone());
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Failure::from(qbind::Error::from(e)))?;
    Ok(())
}

struct Best {
    architecture: Architecture,
    ansatz: AnsatzId,
    encoding: Encoding,
    repetitions: usize,
    parameters: usize,
    /// Mean RMSE for train, test, then each evaluation set.
    rmse: Vec<f64>,
}

fn best_per_architecture(rows: &[Row], architecture: Architecture) -> Option<Best> {
    let mut groups: Vec<((AnsatzId, Encoding), Vec<&Row>)> = Vec::new();
    for r in rows.iter().filter(|r| r.job.architecture == architecture && r.ok()) {
        let key = (r.job.ansatz, r.job.encoding);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(r),
            None => groups.push((key, vec![r])),
        }
    }
    let mut best: Option<Best> = None;
    for ((ansatz, encoding), members) in groups {
        let n = members.len() as f64;
        let n_cols = 2 + members[0].eval_rmse.len();
        let mut rmse = vec![0.0; n_cols];
        for r in &members {
            let vals = [r.train_rmse, r.test_rmse]
                .into_iter()
                .chain(r.eval_rmse.iter().copied());
            for (acc, v) in rmse.iter_mut().zip(vals) {
                *acc += v.unwrap_or(f64::NAN) / n;
            }
        }
        if best.as_ref().is_none_or(|b| rmse[1] < b.rmse[1]) {
            best = Some(Best {
                architecture,
                ansatz,
                encoding,
                repetitions: members.len(),
                parameters: members[0].parameters.unwrap_or(0),
                rmse,
            });
        }
    }
    best
}

fn write_summary(
    path: &Path,
    rows: &[Row],
    architectures: &[Architecture],
    eval_names: &[String],
    baseline: &BTreeMap<String, f64>,
) -> Result<(), Failure> {
    let sets: Vec<String> = ["train".to_string(), "test".to_string()]
        .into_iter()
        .chain(eval_names.iter().cloned())
        .collect();
    let base: Vec<Option<f64>> = sets.iter().map(|s| baseline.get(&s.to_lowercase()).copied()).collect();
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    let mut head: Vec<String> = ["model", "ansatz", "encoding", "repetitions"].map(String::from).to_vec();
    head.extend(sets.iter().map(|s| format!("{s}_rmse")));
    head.push("parameters".into());
    head.extend(sets.iter().map(|s| format!("{s}_improvement_pct")));
    w.write_record(&head).map_err(csv_err)?;

    let mut rec = vec!["baseline".to_string(), String::new(), String::new(), String::new()];
    rec.extend(base.iter().map(|v| opt(*v)));
    rec.push(String::new());
    rec.extend(sets.iter().map(|_| String::new()));
    w.write_record(&rec).map_err(csv_err)?;

    for &arch in architectures {
        let Some(b) = best_per_architecture(rows, arch) else {
            continue;
        };
        let mut rec = vec![
            b.architecture.to_string(),
            b.ansatz.to_string(),
            b.encoding.to_string(),
            b.repetitions.to_string(),
        ];
        rec.extend(b.rmse.iter().map(|v| v.to_string()));
        rec.push(b.parameters.to_string());
        rec.extend(b.rmse.iter().zip(&base).map(|(m, bl)| {
            bl.map(|bl| format!("{:.2}", (bl - m) / bl * 100.0))
                .unwrap_or_default()
        }));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Failure::from(qbind::Error::from(e)))?;
    Ok(())
}

pub fn run(args: &GridArgs, file: &FileConfig, common: &Common) -> Result<(), Failure> {
    let g = &file.grid;
    let architectures = pick("architecture", &args.architectures, &g.architectures, &Architecture::ALL)?;
    let ansatze = pick("ansatz", &args.ansatze, &g.ansatze, &AnsatzId::ALL)?;
    let encodings = pick("encoding", &args.encodings, &g.encodings, &Encoding::ALL)?;
    let repetitions = args.repetitions.or(g.repetitions).unwrap_or(1);
    if repetitions == 0 {
        return Err(Failure::Config("repetitions must be at least 1".into()));
    }
    let construct_only = args.construct_only || g.construct_only.unwrap_or(false);
    let baseline = baseline(args, file)?;
    let data_opts = DataOptions::resolve(&args.data, &file.data)?;
    let eval_names = data_opts.eval_names();

    let mut jobs = Vec::new();
    for &architecture in &architectures {
        for &ansatz in &ansatze {
            for &encoding in &encodings {
                for repetition in 0..repetitions {
                    jobs.push(Job {
                        architecture,
                        ansatz,
                        encoding,
                        repetition,
                    });
                }
            }
        }
    }

    let out = common.ensure_out()?;
    let rows: Vec<Row> = if construct_only {
        jobs.iter().map(|&j| construct(j, eval_names.len())).collect()
    } else {
        let cfg = train_config(&args.training, &file.training, common.seed, data_opts.test_fraction)?;
        let data = load_datasets(&data_opts, common.seed)?;
        common
            .pool()?
            .install(|| jobs.par_iter().map(|&j| execute(j, &data, &cfg)).collect())
    };

    for &arch in &architectures {
        let subset: Vec<&Row> = rows.iter().filter(|r| r.job.architecture == arch).collect();
        write_report(&out.join(format!("{arch}.csv")), &subset, &eval_names)?;
    }
    if !construct_only {
        write_summary(&out.join("summary.csv"), &rows, &architectures, &eval_names, &baseline)?;
    }
    for r in &rows {
        println!(
            "{:<10} {} {:<9} rep={} parameters={} train_rmse={} test_rmse={} {}",
            r.job.architecture.to_string(),
            r.job.ansatz,
            r.job.encoding.to_string(),
            r.job.repetition,
            r.parameters.map(|p| p.to_string()).unwrap_or_else(|| "-".into()),
            r.train_rmse.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into()),
            r.test_rmse.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into()),
            r.status
        );
    }
    let failed = rows.iter().filter(|r| r.status.starts_with("failed")).count();
    if failed > 0 {
        return Err(Failure::Numerical(format!(
            "{failed} of {} variant runs failed; see the status column",
            rows.len()
        )));
    }
    Ok(())
}
