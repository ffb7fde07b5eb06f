//! Published reference figures the built circuits and models are checked against.

use super::{build_ansatz, metrics::with_layers, AnsatzId, ComplexityReport, Encoding, EncodingSpec};
use crate::error::Result;

/// Layers used by every shipped experiment.
pub const DEFAULT_LAYERS: usize = 2;

/// Published complexity row for a two-layer circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PublishedComplexity {
    pub ansatz: AnsatzId,
    pub encoding: Encoding,
    pub layers: usize,
    pub depth: usize,
    pub two_qubit_gates: usize,
    pub total_gates: usize,
    pub trainable_params: usize,
}

const fn row(
    ansatz: AnsatzId,
    encoding: Encoding,
    depth: usize,
    two_qubit_gates: usize,
    total_gates: usize,
    trainable_params: usize,
) -> PublishedComplexity {
    PublishedComplexity {
        ansatz,
        encoding,
        layers: 2,
        depth,
        two_qubit_gates,
        total_gates,
        trainable_params,
    }
}

pub const PUBLISHED_COMPLEXITY: [PublishedComplexity; 10] = [
    row(AnsatzId::A1, Encoding::Angle, 72, 32, 72, 24),
    row(AnsatzId::A1, Encoding::Amplitude, 15, 8, 17, 24),
    row(AnsatzId::A2, Encoding::Angle, 128, 96, 232, 56),
    row(AnsatzId::A2, Encoding::Amplitude, 30, 24, 57, 56),
    row(AnsatzId::A3, Encoding::Angle, 72, 56, 96, 24),
    row(AnsatzId::A3, Encoding::Amplitude, 17, 14, 23, 24),
    row(AnsatzId::A4, Encoding::Angle, 80, 64, 136, 32),
    row(AnsatzId::A4, Encoding::Amplitude, 18, 16, 33, 32),
    row(AnsatzId::A5, Encoding::Angle, 80, 64, 136, 32),
    row(AnsatzId::A5, Encoding::Amplitude, 18, 16, 33, 32),
];

/// A3 is built with 21 trainable parameters: the published model totals
/// (26 sequential, 595 parallel, 234 ensemble) all require 21, while the
/// complexity row lists 24.
pub const A3_BUILT_PARAMS: usize = 21;

pub fn published_complexity(ansatz: AnsatzId, encoding: Encoding) -> PublishedComplexity {
    *PUBLISHED_COMPLEXITY
        .iter()
        .find(|r| r.ansatz == ansatz && r.encoding == encoding)
        .expect("every ansatz/encoding pair has a row")
}

/// Published total parameter counts per ansatz (identical for both encodings).
pub const PUBLISHED_SEQUENTIAL_PARAMS: [usize; 5] = [29, 61, 26, 37, 37];
pub const PUBLISHED_PARALLEL_PARAMS: [usize; 5] = [601, 665, 595, 617, 617];
pub const PUBLISHED_ENSEMBLE_PARAMS: [usize; 5] = [261, 549, 234, 333, 333];

/// Baseline classical network RMSE used in the summary report:
/// train, test, nanobody set, PDBind set.
pub const BASELINE_RMSE: [(&str, f64); 4] = [
    ("train", 2.43),
    ("test", 2.14),
    ("nbs", 1.66),
    ("pdbind", 2.45),
];

/// Outcome of one complexity comparison.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Match,
    /// Documented and expected, not a failure.
    KnownDeviation(String),
    Mismatch(String),
}

#[derive(Clone, Debug)]
pub struct ComplexityCheck {
    pub published: PublishedComplexity,
    pub built: ComplexityReport,
    pub total_gates: Verdict,
    pub two_qubit_gates: Verdict,
    pub trainable_params: Verdict,
    /// Depth is informational only.
    pub depth_matches: bool,
}

impl ComplexityCheck {
    pub fn passed(&self) -> bool {
        [&self.total_gates, &self.two_qubit_gates, &self.trainable_params]
            .iter()
            .all(|v| !matches!(v, Verdict::Mismatch(_)))
    }
}

fn compare(what: &str, built: usize, published: usize) -> Verdict {
    if built == published {
        Verdict::Match
    } else {
        Verdict::Mismatch(format!("{what}: built {built}, published {published}"))
    }
}

/// Build the two-layer circuit for `(ansatz, encoding)` and compare it to its
/// published row.
pub fn check_published_complexity(ansatz: AnsatzId, encoding: Encoding) -> Result<ComplexityCheck> {
    let published = published_complexity(ansatz, encoding);
    let circuit = build_ansatz(ansatz, EncodingSpec::standard(encoding), published.layers)?;
    let built = with_layers(&circuit, published.layers);
    let trainable_params = if ansatz == AnsatzId::A3
        && built.trainable_params == A3_BUILT_PARAMS
        && published.trainable_params != A3_BUILT_PARAMS
    {
        Verdict::KnownDeviation(format!(
            "params: built {A3_BUILT_PARAMS} to agree with the model totals, published {}",
            published.trainable_params
        ))
    } else {
        compare("params", built.trainable_params, published.trainable_params)
    };
    Ok(ComplexityCheck {
        published,
        built,
        total_gates: compare("gates", built.total_gates, published.total_gates),
        two_qubit_gates: compare("two_qubit", built.two_qubit_gates, published.two_qubit_gates),
        trainable_params,
        depth_matches: built.depth == published.depth,
    })
}
