use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use super::Circuit;
use crate::error::{Error, Result};
use crate::sim::{Binding, GateKind, GateOp};

/// Number of input features every shipped model consumes.
pub const N_FEATURES: usize = 16;

/// Qubits per re-upload block in angle encoding.
pub const BLOCK_SIZE: usize = 4;

/// Angle-encoding rotations use `RY(π · x)`.
pub const ANGLE_SCALE: f64 = PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Encoding {
    /// `RY(π·x)` rotations, re-uploaded block by block.
    Angle,
    /// The whole feature vector, normalized, written into the amplitudes.
    Amplitude,
}

impl Encoding {
    pub const ALL: [Encoding; 2] = [Encoding::Angle, Encoding::Amplitude];

    pub fn name(self) -> &'static str {
        match self {
            Encoding::Angle => "angle",
            Encoding::Amplitude => "amplitude",
        }
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Encoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "angle" => Ok(Encoding::Angle),
            "amplitude" | "amp" => Ok(Encoding::Amplitude),
            other => Err(Error::config(format!("unknown encoding `{other}`"))),
        }
    }
}

/// How `n_features` classical values become quantum state content.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EncodingSpec {
    pub kind: Encoding,
    pub n_features: usize,
}

impl EncodingSpec {
    pub fn new(kind: Encoding, n_features: usize) -> Result<Self> {
        let spec = EncodingSpec { kind, n_features };
        match kind {
            Encoding::Angle if n_features == 0 || n_features % BLOCK_SIZE != 0 => {
                Err(Error::config(format!(
                    "angle encoding needs a multiple of {BLOCK_SIZE} features, got {n_features}"
                )))
            }
            Encoding::Amplitude if !n_features.is_power_of_two() || n_features < 2 => {
                Err(Error::config(format!(
                    "amplitude encoding needs a power-of-two feature count, got {n_features}"
                )))
            }
            _ => Ok(spec),
        }
    }

    /// The standard 16-feature spec for `kind`.
    pub fn standard(kind: Encoding) -> Self {
        EncodingSpec {
            kind,
            n_features: N_FEATURES,
        }
    }

    /// Register width: `block_size` for angle, `log2(n_features)` for amplitude.
    pub fn width(&self) -> usize {
        match self.kind {
            Encoding::Angle => BLOCK_SIZE,
            Encoding::Amplitude => self.n_features.trailing_zeros() as usize,
        }
    }

    /// Re-upload blocks per layer; amplitude encoding has none.
    pub fn n_blocks(&self) -> usize {
        match self.kind {
            Encoding::Angle => self.n_features / BLOCK_SIZE,
            Encoding::Amplitude => 0,
        }
    }

    pub fn block_size(&self) -> usize {
        match self.kind {
            Encoding::Angle => BLOCK_SIZE,
            Encoding::Amplitude => 0,
        }
    }
}

/// A single amplitude-prep op over `log2(n_features)` qubits reading feature
/// slots `0..n_features`. Normalization happens when the circuit is run.
pub fn build_amplitude_encoding(n_features: usize) -> Result<Circuit> {
    let spec = EncodingSpec::new(Encoding::Amplitude, n_features)?;
    let width = spec.width();
    Circuit::new(width, vec![amplitude_prep(width)])
}

pub(crate) fn amplitude_prep(width: usize) -> GateOp {
    GateOp::new(
        GateKind::AmplitudePrep,
        (0..width).collect(),
        (0..1 << width).map(Binding::feature).collect(),
    )
}

/// `RY(π·x[first + w])` on each wire `w` of the block.
pub(crate) fn angle_block(first_feature: usize, width: usize) -> Vec<GateOp> {
    (0..width)
        .map(|w| {
            GateOp::single(
                GateKind::Ry,
                w,
                vec![Binding::Feature {
                    slot: first_feature + w,
                    scale: ANGLE_SCALE,
                }],
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::StateVector;

    #[test]
    fn amplitude_encoding_shape() {
        let c = build_amplitude_encoding(16).unwrap();
        assert_eq!(c.ops().len(), 1);
        assert_eq!(c.n_qubits(), 4);
        assert_eq!(c.feature_slots(), 16);
        assert_eq!(c.trainable_slots(), 0);
    }

    #[test]
    fn amplitude_encoding_rejects_non_power_of_two() {
        assert!(matches!(build_amplitude_encoding(15), Err(Error::Config(_))));
    }

    #[test]
    fn equal_features_give_uniform_superposition() {
        let c = build_amplitude_encoding(16).unwrap();
        let s = c.run(&[0.3; 16], &[]).unwrap();
        for p in s.probabilities() {
            assert!((p - 1.0 / 16.0).abs() < 1e-15);
        }
    }

    #[test]
    fn ramp_features_normalize_by_sqrt_1496() {
        // Σ i² for i = 1..=16 is 1496.
        let sum_sq: f64 = (1..=16).map(|i| (i * i) as f64).sum();
        assert_eq!(sum_sq, 1496.0);
        let x: Vec<f64> = (1..=16).map(f64::from).collect();
        let s = build_amplitude_encoding(16).unwrap().run(&x, &[]).unwrap();
        for (a, v) in s.amplitudes().iter().zip(&x) {
            assert!((a.re - v / 1496f64.sqrt()).abs() < 1e-15);
            assert_eq!(a.im, 0.0);
        }
        let direct = StateVector::prepare_amplitude_state(&x).unwrap();
        assert_eq!(&s, &direct);
    }

    #[test]
    fn widths() {
        let angle = EncodingSpec::standard(Encoding::Angle);
        assert_eq!((angle.width(), angle.n_blocks(), angle.block_size()), (4, 4, 4));
        assert_eq!(angle.block_size() * angle.n_blocks(), angle.n_features);
        assert_eq!(EncodingSpec::standard(Encoding::Amplitude).width(), 4);
    }
}
