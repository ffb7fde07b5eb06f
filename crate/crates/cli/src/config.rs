//! On-disk experiment configuration.
//!
//! ```toml
//! [common]
//! seed = 7
//! workers = 4
//! out = "runs/grid"
//!
//! [data]
//! train = "data/train.csv"
//! test_fraction = 0.2
//! eval = { nbs = "data/nbs.csv", pdbind = "data/pdbind.csv" }
//!
//! [training]
//! epochs = 300
//! lr_init = 0.01
//!
//! [grid]
//! architectures = ["sequential", "parallel"]
//! repetitions = 3
//! baseline = { pdbind = 2.45 }
//! ```
//!
//! Relative paths are resolved against the directory holding the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::Failure;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub common: CommonSection,
    #[serde(default)]
    pub data: DataSection,
    #[serde(default)]
    pub training: TrainingSection,
    #[serde(default)]
    pub generate: GenerateSection,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub inspect: InspectSection,
    #[serde(default)]
    pub gradcheck: GradcheckSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommonSection {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub train: Option<PathBuf>,
    #[serde(default)]
    pub eval: BTreeMap<String, PathBuf>,
    pub test_fraction: Option<f64>,
    pub synthetic_samples: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingSection {
    pub epochs: Option<usize>,
    pub lr_init: Option<f64>,
    pub lr_min: Option<f64>,
    pub scheduler_patience: Option<usize>,
    pub scheduler_factor: Option<f64>,
    pub improvement_threshold: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateSection {
    pub samples: Option<usize>,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub architecture: Option<String>,
    pub ansatz: Option<String>,
    pub encoding: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub architectures: Option<Vec<String>>,
    pub ansatze: Option<Vec<String>>,
    pub encodings: Option<Vec<String>>,
    pub repetitions: Option<usize>,
    pub construct_only: Option<bool>,
    #[serde(default)]
    pub baseline: BTreeMap<String, f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InspectSection {
    pub ansatz: Option<String>,
    pub encoding: Option<String>,
    pub layers: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradcheckSection {
    pub seeds: Option<usize>,
    pub tolerance: Option<f64>,
    pub step: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: FileConfig = toml::from_str(&text)
            .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.rebase(base);
        Ok(cfg)
    }

    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        self.common.out.as_mut().map(fix);
        self.data.train.as_mut().map(fix);
        self.data.eval.values_mut().for_each(fix);
        self.generate.path.as_mut().map(fix);
    }
}

/// Parse an identifier that came from the config file.
pub fn parse_id<T>(what: &str, raw: &str) -> Result<T, Failure>
where
    T: std::str::FromStr<Err = qbind::Error>,
{
    raw.parse()
        .map_err(|e: qbind::Error| Failure::Config(format!("{what} `{raw}`: {e}")))
}

pub fn parse_ids<T>(what: &str, raw: &[String]) -> Result<Vec<T>, Failure>
where
    T: std::str::FromStr<Err = qbind::Error>,
{
    raw.iter().map(|r| parse_id(what, r)).collect()
}

/// Split `NAME=VALUE`; a bare value gets `None` as its name.
pub fn split_pair(raw: &str) -> (Option<&str>, &str) {
    match raw.split_once('=') {
        Some((k, v)) => (Some(k.trim()), v.trim()),
        None => (None, raw.trim()),
    }
}
