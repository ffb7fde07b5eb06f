use std::fmt;
use std::str::FromStr;

use super::encoding::{amplitude_prep, angle_block, Encoding, EncodingSpec};
use super::Circuit;
use crate::error::{Error, Result};
use crate::sim::{Binding, GateKind, GateOp};

/// The five built-in variational layouts.
///
/// Every layer is a single-qubit *column* followed by an entangling *block*.
/// With amplitude encoding the block appears once per layer; with angle
/// encoding it follows each of the re-upload blocks and all copies within a
/// layer share the same trainable slots, so both encodings train the same
/// number of parameters.
///
/// | ansatz | column (per layer)        | block                                      |
/// |--------|---------------------------|--------------------------------------------|
/// | A1     | `Rot3` on every wire      | `CNOT` ring `i → i+1`                      |
/// | A2     | `RY` on every wire        | `RZ`, `RX`, all-to-all `CRX`, `RX`         |
/// | A3     | `Rot3` on wires `0..n-1`, `RY` on the last | `CRZ(γ)`, `CNOT` ring, `CNOT` chords `i → i+2` |
/// | A4     | `RY` on every wire        | `RX`, `CRZ` chain `i → i+1`, `CRX` chain `i → i+1` |
/// | A5     | `RY` on every wire        | `RX`, `CRZ` ring descending, `CRX` ring reversed |
///
/// A3's `γ` is a single coupling shared by every layer, which gives it
/// `10·layers + 1` parameters on four wires.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AnsatzId {
    A1,
    A2,
    A3,
    A4,
    A5,
}

impl AnsatzId {
    pub const ALL: [AnsatzId; 5] = [
        AnsatzId::A1,
        AnsatzId::A2,
        AnsatzId::A3,
        AnsatzId::A4,
        AnsatzId::A5,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AnsatzId::A1 => "a1",
            AnsatzId::A2 => "a2",
            AnsatzId::A3 => "a3",
            AnsatzId::A4 => "a4",
            AnsatzId::A5 => "a5",
        }
    }

    pub fn index(self) -> usize {
        self as usize + 1
    }

    fn n_globals(self) -> usize {
        match self {
            AnsatzId::A3 => 1,
            _ => 0,
        }
    }

    fn column(self, width: usize, slots: &mut Slots) -> Vec<GateOp> {
        let rot3 = |w, slots: &mut Slots| {
            GateOp::single(GateKind::Rot3, w, (0..3).map(|_| slots.take()).collect())
        };
        match self {
            AnsatzId::A1 => (0..width).map(|w| rot3(w, slots)).collect(),
            AnsatzId::A3 => {
                let mut ops: Vec<GateOp> = (0..width - 1).map(|w| rot3(w, slots)).collect();
                ops.push(rotation(GateKind::Ry, width - 1, slots));
                ops
            }
            AnsatzId::A2 | AnsatzId::A4 | AnsatzId::A5 => rotation_column(GateKind::Ry, width, slots),
        }
    }

    fn block(self, width: usize, slots: &mut Slots, globals: &[usize]) -> Vec<GateOp> {
        let n = width;
        match self {
            AnsatzId::A1 => (0..n).map(|i| GateOp::cnot(i, (i + 1) % n)).collect(),
            AnsatzId::A2 => {
                let mut ops = rotation_column(GateKind::Rz, n, slots);
                ops.extend(rotation_column(GateKind::Rx, n, slots));
                for c in 0..n {
                    for t in (0..n).filter(|&t| t != c) {
                        ops.push(controlled(GateKind::Crx, c, t, slots));
                    }
                }
                ops.extend(rotation_column(GateKind::Rx, n, slots));
                ops
            }
            AnsatzId::A3 => {
                let mut ops = vec![GateOp::controlled(
                    GateKind::Crz,
                    0,
                    2 % n,
                    Binding::Trainable(globals[0]),
                )];
                ops.extend((0..n).map(|i| GateOp::cnot(i, (i + 1) % n)));
                ops.extend((1..n - 1).map(|i| GateOp::cnot(i, (i + 2) % n)));
                ops
            }
            AnsatzId::A4 => {
                let mut ops = rotation_column(GateKind::Rx, n, slots);
                ops.extend((0..n).map(|i| controlled(GateKind::Crz, i, (i + 1) % n, slots)));
                ops.extend((0..n).map(|i| controlled(GateKind::Crx, i, (i + 1) % n, slots)));
                ops
            }
            AnsatzId::A5 => {
                let mut ops = rotation_column(GateKind::Rx, n, slots);
                ops.extend(
                    (0..n)
                        .rev()
                        .map(|i| controlled(GateKind::Crz, i, (i + 1) % n, slots)),
                );
                ops.extend(
                    (0..n)
                        .map(|k| (k + n - 1) % n)
                        .map(|i| controlled(GateKind::Crx, i, (i + n - 1) % n, slots)),
                );
                ops
            }
        }
    }

    /// One full layer: the column, then the block (amplitude) or the
    /// interleaved encoding blocks each followed by the shared block (angle).
    fn layer(
        self,
        encoding: &EncodingSpec,
        slots: &mut Slots,
        globals: &[usize],
    ) -> Vec<GateOp> {
        let width = encoding.width();
        let mut ops = self.column(width, slots);
        let block = self.block(width, slots, globals);
        match encoding.kind {
            Encoding::Amplitude => ops.extend(block),
            Encoding::Angle => {
                for b in 0..encoding.n_blocks() {
                    ops.extend(angle_block(b * encoding.block_size(), width));
                    ops.extend(block.iter().cloned());
                }
            }
        }
        ops
    }
}

impl fmt::Display for AnsatzId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AnsatzId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        let digits = lower.trim_start_matches("ansatz").trim_start_matches('a');
        match digits {
            "1" => Ok(AnsatzId::A1),
            "2" => Ok(AnsatzId::A2),
            "3" => Ok(AnsatzId::A3),
            "4" => Ok(AnsatzId::A4),
            "5" => Ok(AnsatzId::A5),
            _ => Err(Error::config(format!("unknown ansatz `{s}`"))),
        }
    }
}

struct Slots {
    next: usize,
}

impl Slots {
    fn take(&mut self) -> Binding {
        Binding::Trainable(self.take_index())
    }

    fn take_index(&mut self) -> usize {
        self.next += 1;
        self.next - 1
    }
}

fn rotation(kind: GateKind, wire: usize, slots: &mut Slots) -> GateOp {
    GateOp::single(kind, wire, vec![slots.take()])
}

fn rotation_column(kind: GateKind, width: usize, slots: &mut Slots) -> Vec<GateOp> {
    (0..width).map(|w| rotation(kind, w, slots)).collect()
}

fn controlled(kind: GateKind, control: usize, target: usize, slots: &mut Slots) -> GateOp {
    GateOp::controlled(kind, control, target, slots.take())
}

fn check_width(width: usize) -> Result<()> {
    if width < 3 {
        return Err(Error::config(format!(
            "built-in ansatze need at least 3 wires, got {width}"
        )));
    }
    Ok(())
}

/// A single angle-encoding layer for `ansatz` on the standard 16 features.
pub fn build_angle_reupload_layer(ansatz: AnsatzId) -> Result<Circuit> {
    let spec = EncodingSpec::standard(Encoding::Angle);
    let mut slots = Slots { next: 0 };
    let globals: Vec<usize> = (0..ansatz.n_globals()).map(|_| slots.take_index()).collect();
    Circuit::new(spec.width(), ansatz.layer(&spec, &mut slots, &globals))
}

/// Encoding followed by `layers` trainable layers with fresh slots per layer.
pub fn build_ansatz(ansatz: AnsatzId, encoding: EncodingSpec, layers: usize) -> Result<Circuit> {
    if layers == 0 {
        return Err(Error::config("an ansatz needs at least one layer"));
    }
    let width = encoding.width();
    check_width(width)?;
    let mut slots = Slots { next: 0 };
    let globals: Vec<usize> = (0..ansatz.n_globals()).map(|_| slots.take_index()).collect();
    let mut ops = Vec::new();
    if encoding.kind == Encoding::Amplitude {
        ops.push(amplitude_prep(width));
    }
    for _ in 0..layers {
        ops.extend(ansatz.layer(&encoding, &mut slots, &globals));
    }
    Circuit::new(width, ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::complexity_metrics;

    fn counts(a: AnsatzId, e: Encoding, layers: usize) -> (usize, usize, usize) {
        let c = build_ansatz(a, EncodingSpec::standard(e), layers).unwrap();
        let m = complexity_metrics(&c);
        (m.total_gates, m.two_qubit_gates, m.trainable_params)
    }

    #[test]
    fn mandated_a1_counts() {
        assert_eq!(counts(AnsatzId::A1, Encoding::Amplitude, 2), (17, 8, 24));
        assert_eq!(counts(AnsatzId::A1, Encoding::Angle, 2), (72, 32, 24));
    }

    #[test]
    fn a2_and_a4_counts() {
        assert_eq!(counts(AnsatzId::A2, Encoding::Amplitude, 2), (57, 24, 56));
        assert_eq!(counts(AnsatzId::A4, Encoding::Angle, 2), (136, 64, 32));
    }

    #[test]
    fn a3_reconciled_param_count() {
        assert_eq!(counts(AnsatzId::A3, Encoding::Amplitude, 2), (23, 14, 21));
        assert_eq!(counts(AnsatzId::A3, Encoding::Angle, 2), (96, 56, 21));
    }

    #[test]
    fn single_reupload_layer_binds_each_feature_once() {
        let layer = build_angle_reupload_layer(AnsatzId::A1).unwrap();
        let mut seen = [0usize; 16];
        for op in layer.ops() {
            for b in &op.bindings {
                if let Binding::Feature { slot, .. } = b {
                    seen[*slot] += 1;
                }
            }
        }
        assert_eq!(seen, [1; 16]);
        assert_eq!(
            layer.ops().iter().filter(|op| op.kind == GateKind::Ry).count(),
            16
        );
    }

    #[test]
    fn zero_layers_rejected() {
        assert!(build_ansatz(AnsatzId::A1, EncodingSpec::standard(Encoding::Angle), 0).is_err());
    }

    #[test]
    fn parse_ids() {
        assert_eq!("A3".parse::<AnsatzId>().unwrap(), AnsatzId::A3);
        assert_eq!("ansatz5".parse::<AnsatzId>().unwrap(), AnsatzId::A5);
        assert_eq!("4".parse::<AnsatzId>().unwrap(), AnsatzId::A4);
        assert!("a6".parse::<AnsatzId>().is_err());
    }
}
