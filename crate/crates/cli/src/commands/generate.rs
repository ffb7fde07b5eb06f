use qbind::data::{save_samples, synthetic_samples};

use crate::cli::GenerateArgs;
use crate::config::FileConfig;
use crate::pipeline::{Common, DEFAULT_SYNTHETIC_SAMPLES};
use crate::Failure;

pub fn run(args: &GenerateArgs, file: &FileConfig, common: &Common) -> Result<(), Failure> {
    let n = args
        .samples
        .or(file.generate.samples)
        .unwrap_or(DEFAULT_SYNTHETIC_SAMPLES);
    let path = match args.path.clone().or_else(|| file.generate.path.clone()) {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)
                    .map_err(|e| Failure::Config(format!("cannot create {}: {e}", dir.display())))?;
            }
            p
        }
        None => common.ensure_out()?.join("samples.csv"),
    };
    let set = synthetic_samples(n, common.seed)?;
    save_samples(&set, &path)?;
    println!("wrote {} samples to {}", set.len(), path.display());
    Ok(())
}
