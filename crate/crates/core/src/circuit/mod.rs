//! Circuit IR, encodings, the built-in ansatz library and complexity metrics.

mod ansatz;
mod encoding;
mod metrics;
pub mod reference;

use std::fmt::Write as _;

pub use ansatz::{build_angle_reupload_layer, build_ansatz, AnsatzId};
pub use encoding::{build_amplitude_encoding, Encoding, EncodingSpec, ANGLE_SCALE, BLOCK_SIZE, N_FEATURES};
pub use metrics::{complexity_metrics, ComplexityReport};

use crate::error::{Error, Result};
use crate::sim::{Binding, GateKind, GateOp, StateVector};

/// An ordered list of gate occurrences on a fixed-width register.
///
/// Feature and trainable slot indices are contiguous from zero; an amplitude
/// prep, if present, is the first op and appears once.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<GateOp>,
    feature_slots: usize,
    trainable_slots: usize,
}

fn contiguous_count(used: &[bool], what: &str) -> Result<usize> {
    if let Some(gap) = used.iter().position(|u| !u) {
        return Err(Error::config(format!(
            "{what} slots are not contiguous: slot {gap} unused below slot {}",
            used.len() - 1
        )));
    }
    Ok(used.len())
}

impl Circuit {
    pub fn new(n_qubits: usize, ops: Vec<GateOp>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > crate::sim::MAX_QUBITS {
            return Err(Error::config(format!("invalid register width {n_qubits}")));
        }
        let mut features: Vec<bool> = Vec::new();
        let mut trainables: Vec<bool> = Vec::new();
        for (i, op) in ops.iter().enumerate() {
            let expected_wires = op.kind.n_wires().unwrap_or(n_qubits);
            if op.wires.len() != expected_wires {
                return Err(Error::config(format!(
                    "op {i} ({}) has {} wires, expected {expected_wires}",
                    op.kind,
                    op.wires.len()
                )));
            }
            for (j, &w) in op.wires.iter().enumerate() {
                if w >= n_qubits {
                    return Err(Error::config(format!(
                        "op {i} ({}) uses wire {w} on a {n_qubits}-qubit register",
                        op.kind
                    )));
                }
                if op.wires[..j].contains(&w) {
                    return Err(Error::config(format!("op {i} ({}) repeats wire {w}", op.kind)));
                }
            }
            if op.kind == GateKind::AmplitudePrep {
                if i != 0 {
                    return Err(Error::config("amplitude prep must be the first op"));
                }
                if op.wires.iter().enumerate().any(|(k, &w)| k != w) {
                    return Err(Error::config("amplitude prep must list wires in order"));
                }
            }
            let arity = op.kind.arity(n_qubits);
            if op.bindings.len() != arity {
                return Err(Error::config(format!(
                    "op {i} ({}) has {} bindings, expected {arity}",
                    op.kind,
                    op.bindings.len()
                )));
            }
            for b in &op.bindings {
                let (slots, idx) = match *b {
                    Binding::Constant(_) => continue,
                    Binding::Feature { slot, .. } => (&mut features, slot),
                    Binding::Trainable(slot) => (&mut trainables, slot),
                };
                if slots.len() <= idx {
                    slots.resize(idx + 1, false);
                }
                slots[idx] = true;
            }
        }
        Ok(Circuit {
            n_qubits,
            feature_slots: contiguous_count(&features, "feature")?,
            trainable_slots: contiguous_count(&trainables, "trainable")?,
            ops,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn feature_slots(&self) -> usize {
        self.feature_slots
    }

    pub fn trainable_slots(&self) -> usize {
        self.trainable_slots
    }

    /// Append `other`, shifting its trainable slots past ours. Feature slots
    /// are shared, which is how re-uploading reads the same inputs again.
    pub fn then(self, other: Circuit) -> Result<Circuit> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::config("cannot join circuits of different widths"));
        }
        let offset = self.trainable_slots;
        let mut ops = self.ops;
        ops.extend(other.ops.into_iter().map(|mut op| {
            for b in &mut op.bindings {
                if let Binding::Trainable(s) = b {
                    *s += offset;
                }
            }
            op
        }));
        Circuit::new(self.n_qubits, ops)
    }

    pub(crate) fn check_inputs(&self, features: &[f64], params: &[f64]) -> Result<()> {
        if features.len() < self.feature_slots {
            return Err(Error::config(format!(
                "circuit reads {} features, got {}",
                self.feature_slots,
                features.len()
            )));
        }
        if params.len() < self.trainable_slots {
            return Err(Error::config(format!(
                "circuit has {} trainable slots, got {} values",
                self.trainable_slots,
                params.len()
            )));
        }
        Ok(())
    }

    /// Simulate from `|0…0⟩` (or the prepared amplitudes) and return the final state.
    pub fn run(&self, features: &[f64], params: &[f64]) -> Result<StateVector> {
        self.check_inputs(features, params)?;
        let mut state = StateVector::zero(self.n_qubits)?;
        for op in &self.ops {
            state.apply(op, &op.resolve(features, params))?;
        }
        Ok(state)
    }

    /// `⟨Z⟩` on every wire after running the circuit.
    pub fn expectations(&self, features: &[f64], params: &[f64]) -> Result<Vec<f64>> {
        Ok(self.run(features, params)?.expectations_z())
    }

    /// Plain-text listing, one gate per line: `<index> <kind> <wires> <bindings>`.
    pub fn listing(&self) -> String {
        let mut out = String::new();
        for (i, op) in self.ops.iter().enumerate() {
            let _ = writeln!(out, "{i:>4} {op}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_wires_and_arity() {
        let ry = |w| GateOp::single(GateKind::Ry, w, vec![Binding::Trainable(0)]);
        assert!(Circuit::new(2, vec![ry(2)]).is_err());
        assert!(Circuit::new(2, vec![GateOp::cnot(0, 0)]).is_err());
        assert!(Circuit::new(2, vec![GateOp::single(GateKind::Rot3, 0, vec![Binding::Trainable(0)])]).is_err());
    }

    #[test]
    fn rejects_gapped_slots() {
        let op = GateOp::single(GateKind::Ry, 0, vec![Binding::Trainable(1)]);
        assert!(matches!(Circuit::new(1, vec![op]), Err(Error::Config(_))));
    }

    #[test]
    fn prep_must_come_first() {
        let prep = GateOp::new(
            GateKind::AmplitudePrep,
            vec![0, 1],
            (0..4).map(Binding::feature).collect(),
        );
        assert!(Circuit::new(2, vec![prep.clone()]).is_ok());
        assert!(Circuit::new(2, vec![GateOp::cnot(0, 1), prep]).is_err());
    }

    #[test]
    fn then_offsets_trainable_slots() {
        let a = Circuit::new(1, vec![GateOp::single(GateKind::Rx, 0, vec![Binding::Trainable(0)])]).unwrap();
        let joined = a.clone().then(a).unwrap();
        assert_eq!(joined.trainable_slots(), 2);
        assert_eq!(joined.ops()[1].bindings[0], Binding::Trainable(1));
    }

    #[test]
    fn missing_inputs_are_config_errors() {
        let c = build_amplitude_encoding(16).unwrap();
        assert!(matches!(c.run(&[1.0; 8], &[]), Err(Error::Config(_))));
    }
}
