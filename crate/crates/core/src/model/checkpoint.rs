//! Text checkpoint format.
//!
//! ```text
//! # qbind checkpoint
//! format = 1
//! architecture = parallel
//! ansatz = a2
//! encoding = angle
//! layers = 2
//! members = 1
//! seed = 42
//! param.input.weight = 0.125 -0.0625 ...
//! param.input.bias = 0 0 ...
//! ```
//!
//! One `key = value` per line, `#` starts a comment. Parameter groups are
//! whitespace-separated `f64` values written in shortest round-trip form, so
//! reading a checkpoint back reproduces the store bit for bit.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{build_ensemble, Architecture, HybridModel};
use crate::circuit::{AnsatzId, Encoding};
use crate::error::{Error, Result};

const FORMAT_VERSION: &str = "1";

impl HybridModel {
    pub fn to_checkpoint_string(&self) -> String {
        let mut out = String::from("# qbind checkpoint\n");
        let _ = writeln!(out, "format = {FORMAT_VERSION}");
        let _ = writeln!(out, "architecture = {}", self.architecture);
        let _ = writeln!(out, "ansatz = {}", self.ansatz);
        let _ = writeln!(out, "encoding = {}", self.encoding.kind);
        let _ = writeln!(out, "layers = {}", self.layers);
        let _ = writeln!(out, "members = {}", self.n_members());
        match self.seed {
            Some(s) => {
                let _ = writeln!(out, "seed = {s}");
            }
            None => {
                let _ = writeln!(out, "seed = none");
            }
        }
        for (name, range) in self.groups() {
            let values: Vec<String> = self.params[range].iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "param.{name} = {}", values.join(" "));
        }
        out
    }

    pub fn from_checkpoint_str(text: &str, origin: &Path) -> Result<Self> {
        let err = |msg: String| Error::parse(origin, msg);
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("line {}: expected `key = value`", lineno + 1)))?;
            if entries
                .insert(key.trim().to_string(), value.trim().to_string())
                .is_some()
            {
                return Err(err(format!("line {}: duplicate key `{}`", lineno + 1, key.trim())));
            }
        }
        let mut take = |key: &str| {
            entries
                .remove(key)
                .ok_or_else(|| err(format!("missing key `{key}`")))
        };
        let format = take("format")?;
        if format != FORMAT_VERSION {
            return Err(err(format!("unsupported checkpoint format `{format}`")));
        }
        let architecture: Architecture = take("architecture")?.parse()?;
        let ansatz: AnsatzId = take("ansatz")?.parse()?;
        let encoding: Encoding = take("encoding")?.parse()?;
        let layers: usize = take("layers")?
            .parse()
            .map_err(|e| err(format!("layers: {e}")))?;
        let members: usize = take("members")?
            .parse()
            .map_err(|e| err(format!("members: {e}")))?;
        let seed = match take("seed")?.as_str() {
            "none" => None,
            s => Some(s.parse().map_err(|e| err(format!("seed: {e}")))?),
        };
        let mut model = match architecture {
            Architecture::Ensemble => build_ensemble(ansatz, encoding, members)?,
            a => HybridModel::build(a, ansatz, encoding)?,
        };
        if layers != model.layers {
            return Err(err(format!(
                "checkpoint has {layers} layers, this build supports {}",
                model.layers
            )));
        }
        model.seed = seed;
        for (name, range) in model.groups() {
            let key = format!("param.{name}");
            let raw = take(&key)?;
            let values: Vec<f64> = raw
                .split_whitespace()
                .map(|v| v.parse::<f64>().map_err(|e| err(format!("{key}: {e}"))))
                .collect::<Result<_>>()?;
            if values.len() != range.len() {
                return Err(err(format!(
                    "{key}: expected {} values, found {}",
                    range.len(),
                    values.len()
                )));
            }
            model.params[range].copy_from_slice(&values);
        }
        if let Some(extra) = entries.keys().next() {
            return Err(err(format!("unexpected key `{extra}`")));
        }
        Ok(model)
    }
}

pub fn write_checkpoint(model: &HybridModel, path: &Path) -> Result<()> {
    std::fs::write(path, model.to_checkpoint_string())?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<HybridModel> {
    let text = std::fs::read_to_string(path)?;
    HybridModel::from_checkpoint_str(&text, path)
}
