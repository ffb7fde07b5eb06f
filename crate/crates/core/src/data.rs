//! Sample sets: CSV ingestion, min-max normalization, splits and the
//! synthetic stand-in dataset.
//!
//! The CSV contract is a header `id,f1,...,f16,dg` followed by one sample per
//! row, `.` as the decimal separator and `dg` in kcal/mol.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::circuit::N_FEATURES;
use crate::error::{Error, Result};

pub type Features = [f64; N_FEATURES];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SampleSet {
    pub ids: Vec<String>,
    pub features: Vec<Features>,
    /// Binding energy ΔG in kcal/mol.
    pub targets: Vec<f64>,
}

impl SampleSet {
    pub fn new(ids: Vec<String>, features: Vec<Features>, targets: Vec<f64>) -> Result<Self> {
        if ids.len() != features.len() || ids.len() != targets.len() {
            return Err(Error::config("sample set columns differ in length"));
        }
        if features.iter().flatten().chain(&targets).any(|v| !v.is_finite()) {
            return Err(Error::Input("sample set contains non-finite values".into()));
        }
        Ok(SampleSet {
            ids,
            features,
            targets,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> SampleSet {
        SampleSet {
            ids: indices.iter().map(|&i| self.ids[i].clone()).collect(),
            features: indices.iter().map(|&i| self.features[i]).collect(),
            targets: indices.iter().map(|&i| self.targets[i]).collect(),
        }
    }
}

fn header() -> Vec<String> {
    std::iter::once("id".to_string())
        .chain((1..=N_FEATURES).map(|i| format!("f{i}")))
        .chain(std::iter::once("dg".to_string()))
        .collect()
}

/// Read a sample CSV; row order is preserved.
pub fn load_samples(path: &Path) -> Result<SampleSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let head: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if head.first().map(String::as_str) != Some("id") || head.last().map(String::as_str) != Some("dg") {
        return Err(Error::parse(path, "header must start with `id` and end with `dg`"));
    }
    let n_feat = head.len().saturating_sub(2);
    if n_feat != N_FEATURES {
        return Err(Error::parse(
            path,
            format!("expected {N_FEATURES} features, found {n_feat} feature columns"),
        ));
    }
    if head != header() {
        return Err(Error::parse(
            path,
            format!("feature columns must be named f1..f{N_FEATURES}"),
        ));
    }
    let mut set = SampleSet::default();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let line = row + 2;
        if record.len() != N_FEATURES + 2 {
            return Err(Error::parse(
                path,
                format!(
                    "row {line}: expected {} fields, found {}",
                    N_FEATURES + 2,
                    record.len()
                ),
            ));
        }
        let number = |col: usize| -> Result<f64> {
            let v: f64 = record[col].parse().map_err(|_| {
                Error::parse(
                    path,
                    format!("row {line}, column `{}`: `{}` is not a number", head[col], &record[col]),
                )
            })?;
            if !v.is_finite() {
                return Err(Error::parse(
                    path,
                    format!("row {line}, column `{}`: value is not finite", head[col]),
                ));
            }
            Ok(v)
        };
        let mut features = [0.0; N_FEATURES];
        for (i, f) in features.iter_mut().enumerate() {
            *f = number(i + 1)?;
        }
        set.targets.push(number(N_FEATURES + 1)?);
        set.features.push(features);
        set.ids.push(record[0].to_string());
    }
    if set.is_empty() {
        return Err(Error::parse(path, "no samples"));
    }
    Ok(set)
}

/// Write `set` in the CSV contract; values use shortest round-trip formatting.
pub fn save_samples(set: &SampleSet, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(header())?;
    for i in 0..set.len() {
        let mut row = Vec::with_capacity(N_FEATURES + 2);
        row.push(set.ids[i].clone());
        row.extend(set.features[i].iter().map(f64::to_string));
        row.push(set.targets[i].to_string());
        writer.write_record(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Per-column `(min, max)` fitted on one set and reusable on others.
#[derive(Clone, Debug, PartialEq)]
pub struct MinMax {
    pub min: Features,
    pub max: Features,
}

impl MinMax {
    pub fn fit(set: &SampleSet) -> Self {
        let mut min = [f64::INFINITY; N_FEATURES];
        let mut max = [f64::NEG_INFINITY; N_FEATURES];
        for row in &set.features {
            for (c, &v) in row.iter().enumerate() {
                min[c] = min[c].min(v);
                max[c] = max[c].max(v);
            }
        }
        MinMax { min, max }
    }

    /// `(x − min)/(max − min)`; constant columns map to 0. No clipping.
    pub fn apply(&self, set: &SampleSet) -> SampleSet {
        let features = set
            .features
            .iter()
            .map(|row| {
                let mut out = [0.0; N_FEATURES];
                for c in 0..N_FEATURES {
                    let span = self.max[c] - self.min[c];
                    out[c] = if span > 0.0 {
                        (row[c] - self.min[c]) / span
                    } else {
                        0.0
                    };
                }
                out
            })
            .collect();
        SampleSet {
            ids: set.ids.clone(),
            features,
            targets: set.targets.clone(),
        }
    }
}

/// Fit min-max on `set` and apply it.
pub fn minmax_normalize(set: &SampleSet) -> (SampleSet, MinMax) {
    let fit = MinMax::fit(set);
    (fit.apply(set), fit)
}

fn shuffled(n: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    idx
}

/// Seeded shuffle split; `round(N · test_fraction)` samples go to the test side.
/// Both sides keep the original row order.
pub fn split_train_test(set: &SampleSet, test_fraction: f64, seed: u64) -> Result<(SampleSet, SampleSet)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::config(format!(
            "test fraction {test_fraction} outside (0, 1)"
        )));
    }
    let n_test = (set.len() as f64 * test_fraction).round() as usize;
    if n_test == 0 || n_test >= set.len() {
        return Err(Error::config(format!(
            "splitting {} samples at {test_fraction} leaves an empty side",
            set.len()
        )));
    }
    let idx = shuffled(set.len(), seed);
    let mut test: Vec<usize> = idx[..n_test].to_vec();
    let mut train: Vec<usize> = idx[n_test..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    Ok((set.select(&train), set.select(&test)))
}

/// Seeded shuffle cut into `k` disjoint subsets whose sizes differ by at most one.
pub fn partition_ensemble_subsets(train: &SampleSet, k: usize, seed: u64) -> Result<Vec<SampleSet>> {
    if k == 0 || train.len() < k {
        return Err(Error::config(format!(
            "cannot partition {} samples into {k} subsets",
            train.len()
        )));
    }
    let idx = shuffled(train.len(), seed);
    let (base, extra) = (train.len() / k, train.len() % k);
    let mut out = Vec::with_capacity(k);
    let mut start = 0;
    for i in 0..k {
        let size = base + usize::from(i < extra);
        out.push(train.select(&idx[start..start + size]));
        start += size;
    }
    Ok(out)
}

/// `sqrt(mean((prediction − target)²))`.
pub fn rmse(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    if predictions.len() != targets.len() || predictions.is_empty() {
        return Err(Error::Input(format!(
            "rmse needs equal non-empty lengths, got {} and {}",
            predictions.len(),
            targets.len()
        )));
    }
    let sse: f64 = predictions
        .iter()
        .zip(targets)
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    Ok((sse / predictions.len() as f64).sqrt())
}

/// Bounds of the synthetic binding energies, kcal/mol.
pub const SYNTHETIC_DG_RANGE: (f64, f64) = (-18.0, -2.0);

/// Noise standard deviation added to the synthetic targets, kcal/mol.
pub const SYNTHETIC_NOISE: f64 = 0.1;

/// Deterministic score behind the synthetic targets:
///
/// `s(x) = Σᵢ cᵢ·(xᵢ − ½) + ½·sin(2π·x₀)·x₁ + 2·(x₂ − ½)(x₃ − ½)`
/// with `cᵢ = (−1)ⁱ·((i mod 4) + 1)/8`.
pub fn synthetic_score(x: &Features) -> f64 {
    let linear: f64 = x
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * ((i % 4) as f64 + 1.0) / 8.0 * (v - 0.5)
        })
        .sum();
    linear
        + 0.5 * (std::f64::consts::TAU * x[0]).sin() * x[1]
        + 2.0 * (x[2] - 0.5) * (x[3] - 0.5)
}

/// `n` samples with features `~ U(0,1)` and
/// `ΔG = clamp(−10 + 7·tanh(s(x)) + N(0, 0.1²), −18, −2)`.
pub fn synthetic_samples(n: usize, seed: u64) -> Result<SampleSet> {
    if n < 10 {
        return Err(Error::config(format!("synthetic sets need at least 10 samples, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, SYNTHETIC_NOISE).expect("valid normal");
    let width = (n as f64).log10().floor() as usize + 1;
    let mut set = SampleSet::default();
    for i in 0..n {
        let mut x = [0.0; N_FEATURES];
        for v in &mut x {
            *v = rng.random::<f64>();
        }
        let dg = -10.0 + 7.0 * synthetic_score(&x).tanh() + noise.sample(&mut rng);
        set.ids.push(format!("syn{:0width$}", i + 1));
        set.features.push(x);
        set.targets
            .push(dg.clamp(SYNTHETIC_DG_RANGE.0, SYNTHETIC_DG_RANGE.1));
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn tiny(n: usize) -> SampleSet {
        SampleSet {
            ids: (0..n).map(|i| format!("s{i}")).collect(),
            features: (0..n).map(|i| [i as f64; N_FEATURES]).collect(),
            targets: (0..n).map(|i| -(i as f64)).collect(),
        }
    }

    #[test]
    fn minmax_columns() {
        let mut set = tiny(3);
        for (r, v) in [2.0, 4.0, 6.0].into_iter().enumerate() {
            set.features[r][0] = v;
            set.features[r][1] = 5.0;
        }
        let (norm, fit) = minmax_normalize(&set);
        let col0: Vec<f64> = norm.features.iter().map(|r| r[0]).collect();
        let col1: Vec<f64> = norm.features.iter().map(|r| r[1]).collect();
        assert_eq!(col0, vec![0.0, 0.5, 1.0]);
        assert_eq!(col1, vec![0.0, 0.0, 0.0]);

        let mut held_out = tiny(1);
        held_out.features[0][0] = 8.0;
        // (8 − 2) / (6 − 2) = 1.5, kept unclipped.
        assert_eq!(fit.apply(&held_out).features[0][0], 1.5);
    }

    #[test]
    fn split_sizes_and_partition() {
        let set = tiny(10);
        let (train, test) = split_train_test(&set, 0.2, 7).unwrap();
        assert_eq!((train.len(), test.len()), (8, 2));
        let (train2, test2) = split_train_test(&set, 0.2, 7).unwrap();
        assert_eq!((train.clone(), test.clone()), (train2, test2));
        let mut ids: Vec<String> = train.ids.iter().chain(&test.ids).cloned().collect();
        ids.sort();
        let mut want = set.ids.clone();
        want.sort();
        assert_eq!(ids, want);
    }

    #[test]
    fn split_rejects_empty_side() {
        assert!(split_train_test(&tiny(3), 0.01, 1).is_err());
        assert!(split_train_test(&tiny(3), 0.0, 1).is_err());
        assert!(split_train_test(&tiny(3), 1.0, 1).is_err());
    }

    #[test]
    fn partition_rejects_small_sets() {
        assert!(partition_ensemble_subsets(&tiny(8), 9, 0).is_err());
        let parts = partition_ensemble_subsets(&tiny(20), 9, 0).unwrap();
        let sizes: Vec<usize> = parts.iter().map(SampleSet::len).collect();
        assert_eq!(sizes, vec![3, 3, 2, 2, 2, 2, 2, 2, 2]);
    }

    #[test]
    fn rmse_values() {
        assert_eq!(rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert!((rmse(&[0.0, 0.0], &[3.0, 4.0]).unwrap() - 12.5f64.sqrt()).abs() < 1e-15);
        assert!(rmse(&[1.0], &[1.0, 2.0]).is_err());
        assert!(rmse(&[], &[]).is_err());
    }

    fn write_csv(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    fn row(id: &str, n: usize) -> String {
        let vals: Vec<String> = (0..n).map(|i| format!("0.{i}")).collect();
        format!("{id},{},-7.5", vals.join(","))
    }

    #[test]
    fn loads_well_formed_file() {
        let head = header().join(",");
        let f = write_csv(&format!("{head}\n{}\n{}\n{}\n", row("a", 16), row("b", 16), row("c", 16)));
        let set = load_samples(f.path()).unwrap();
        assert_eq!(set.ids, vec!["a", "b", "c"]);
        assert_eq!(set.targets, vec![-7.5; 3]);
        assert_eq!(set.features[0][3], 0.3);
    }

    #[test]
    fn fifteen_features_is_parse_error() {
        let head: Vec<String> = std::iter::once("id".to_string())
            .chain((1..=15).map(|i| format!("f{i}")))
            .chain(std::iter::once("dg".into()))
            .collect();
        let f = write_csv(&format!("{}\n{}\n", head.join(","), row("a", 15)));
        let err = load_samples(f.path()).unwrap_err().to_string();
        assert!(err.contains("expected 16 features"), "{err}");
    }

    #[test]
    fn bad_cell_names_row_and_column() {
        let head = header().join(",");
        let bad = row("a", 16).replace("0.4", "abc");
        let f = write_csv(&format!("{head}\n{}\n{bad}\n", row("ok", 16)));
        let err = load_samples(f.path()).unwrap_err().to_string();
        assert!(err.contains("row 3") && err.contains("f5"), "{err}");
    }

    #[test]
    fn synthetic_contract() {
        let set = synthetic_samples(81, 3).unwrap();
        assert_eq!(set.len(), 81);
        assert!(set.features.iter().flatten().all(|v| (0.0..1.0).contains(v)));
        assert!(set.targets.iter().all(|v| (-18.0..=-2.0).contains(v)));
        assert_eq!(set, synthetic_samples(81, 3).unwrap());
        assert!(synthetic_samples(9, 3).is_err());
    }
}
