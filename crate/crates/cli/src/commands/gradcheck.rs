use qbind::circuit::{AnsatzId, Encoding, N_FEATURES};
use qbind::grad::{circuit_finite_difference_check, finite_difference_check};
use qbind::model::{Architecture, HybridModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cli::GradcheckArgs;
use crate::config::FileConfig;
use crate::pipeline::Common;
use crate::Failure;

struct Row {
    label: String,
    /// Worst circuit and model deviations, or why the check could not run.
    outcome: Result<(f64, f64), String>,
}

fn check_variant(
    arch: Architecture,
    ansatz: AnsatzId,
    enc: Encoding,
    base_seed: u64,
    seeds: usize,
    h: f64,
) -> qbind::Result<(f64, f64)> {
    let mut model = HybridModel::build(arch, ansatz, enc)?;
    let mut worst = (0.0f64, 0.0f64);
    for s in 0..seeds as u64 {
        let seed = base_seed.wrapping_add(s);
        model.init_parameters(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6772_6164);
        let x: Vec<f64> = (0..N_FEATURES).map(|_| rng.random_range(0.0..1.0)).collect();
        let target = rng.random_range(-18.0..-2.0);
        worst.1 = worst.1.max(finite_difference_check(&model, &x, target, h)?);

        let c = model.circuit();
        let cx: Vec<f64> = (0..c.feature_slots()).map(|_| rng.random_range(0.0..1.0)).collect();
        let cp: Vec<f64> = (0..c.trainable_slots())
            .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
            .collect();
        worst.0 = worst.0.max(circuit_finite_difference_check(c, &cx, &cp, h)?);
    }
    Ok(worst)
}

pub fn run(args: &GradcheckArgs, file: &FileConfig, common: &Common) -> Result<(), Failure> {
    let seeds = args.seeds.or(file.gradcheck.seeds).unwrap_or(10);
    let tolerance = args.tolerance.or(file.gradcheck.tolerance).unwrap_or(1e-5);
    let h = args.step.or(file.gradcheck.step).unwrap_or(1e-5);
    if seeds == 0 {
        return Err(Failure::Config("gradcheck needs at least one seed".into()));
    }
    if !(tolerance >= 0.0 && tolerance.is_finite()) {
        return Err(Failure::Config(format!("tolerance must be non-negative, got {tolerance}")));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Failure::Config(format!("step must be positive, got {h}")));
    }
    let variants: Vec<(Architecture, AnsatzId, Encoding)> = Architecture::ALL
        .into_iter()
        .flat_map(|a| AnsatzId::ALL.into_iter().flat_map(move |z| Encoding::ALL.map(|e| (a, z, e))))
        .collect();
    let rows: Vec<Row> = common.pool()?.install(|| {
        variants
            .par_iter()
            .map(|&(a, z, e)| {
                Row {
                    label: format!("{:<10} {z} {:<9}", a.to_string(), e.to_string()),
                    outcome: check_variant(a, z, e, common.seed, seeds, h).map_err(|err| err.to_string()),
                }
            })
            .collect()
    });
    let mut failed = 0;
    for r in &rows {
        match &r.outcome {
            Ok((circuit_dev, model_dev)) => {
                let pass = *circuit_dev < tolerance && *model_dev < tolerance;
                failed += usize::from(!pass);
                println!(
                    "{}  circuit_max_dev={circuit_dev:.3e}  model_max_dev={model_dev:.3e}  {}",
                    r.label,
                    if pass { "PASS" } else { "FAIL" }
                );
            }
            Err(msg) => {
                failed += 1;
                println!("{}  error: {msg}  FAIL", r.label);
            }
        }
    }
    println!(
        "# gradcheck: {}/{} variants pass at tolerance {tolerance:e} over {seeds} seed(s)",
        rows.len() - failed,
        rows.len()
    );
    if failed > 0 {
        return Err(Failure::Conformance(format!("{failed} variant(s) exceed the tolerance")));
    }
    Ok(())
}
