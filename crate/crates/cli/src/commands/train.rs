use qbind::circuit::{AnsatzId, Encoding};
use qbind::model::{write_checkpoint, Architecture};

use crate::cli::TrainArgs;
use crate::config::{parse_id, FileConfig};
use crate::pipeline::{load_datasets, run_variant, train_config, write_normalization, Common, DataOptions};
use crate::Failure;

fn short(v: f64) -> String {
    if v.abs() < 1e4 {
        format!("{v:.4}")
    } else {
        format!("{v:.3e}")
    }
}

pub fn run(args: &TrainArgs, file: &FileConfig, common: &Common) -> Result<(), Failure> {
    let sect = &file.train;
    let architecture = match (args.architecture, &sect.architecture) {
        (Some(a), _) => a,
        (None, Some(raw)) => parse_id("architecture", raw)?,
        (None, None) => Architecture::Sequential,
    };
    let ansatz = match (args.ansatz, &sect.ansatz) {
        (Some(a), _) => a,
        (None, Some(raw)) => parse_id("ansatz", raw)?,
        (None, None) => AnsatzId::A1,
    };
    let encoding = match (args.encoding, &sect.encoding) {
        (Some(e), _) => e,
        (None, Some(raw)) => parse_id("encoding", raw)?,
        (None, None) => Encoding::Amplitude,
    };
    let data_opts = DataOptions::resolve(&args.data, &file.data)?;
    let cfg = train_config(&args.training, &file.training, common.seed, data_opts.test_fraction)?;
    let out = common.ensure_out()?;
    let data = load_datasets(&data_opts, common.seed)?;

    let every = (cfg.epochs / 10).max(1);
    let pool = common.pool()?;
    let outcome = pool.install(|| {
        run_variant(architecture, ansatz, encoding, &data, &cfg, |r| {
            if r.epoch % every == 0 {
                eprintln!(
                    "epoch {:>4}  train_rmse {}  test_rmse {}  lr {:e}",
                    r.epoch,
                    short(r.train_rmse),
                    short(r.test_rmse.unwrap_or(f64::NAN)),
                    r.lr
                );
            }
        })
    })?;

    outcome.history.write_csv(&out.join("history.csv"))?;
    write_checkpoint(&outcome.model, &out.join("checkpoint.txt"))?;
    write_normalization(&data.normalization, &out.join("normalization.csv"))?;

    let mut line = format!(
        "{architecture} {ansatz} {encoding} train_rmse={} test_rmse={}",
        outcome.history.final_train_rmse,
        outcome.history.final_test_rmse.unwrap_or(f64::NAN)
    );
    for ((name, _), v) in data.evals.iter().zip(&outcome.eval_rmse) {
        line.push_str(&format!(" {name}_rmse={v}"));
    }
    line.push_str(&format!(
        " parameters={} train_seconds={:.3}",
        outcome.model.param_count(),
        outcome.seconds
    ));
    println!("{line}");
    Ok(())
}
