use super::Circuit;
use crate::sim::{Binding, GateKind};

/// Size and shape figures for one circuit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ComplexityReport {
    pub layers: usize,
    /// Greedy wire-conflict layering: each gate lands one level above the
    /// highest level among its wires; amplitude prep spans every wire.
    pub depth: usize,
    /// Depth if no two gates ever shared a time step.
    pub serial_depth: usize,
    pub two_qubit_gates: usize,
    pub total_gates: usize,
    pub trainable_params: usize,
}

pub fn complexity_metrics(circuit: &Circuit) -> ComplexityReport {
    let mut level = vec![0usize; circuit.n_qubits()];
    let mut trainable = vec![false; circuit.trainable_slots()];
    let mut report = ComplexityReport::default();
    for op in circuit.ops() {
        report.total_gates += 1;
        if op.kind.is_two_qubit() {
            report.two_qubit_gates += 1;
        }
        let wires: Vec<usize> = if op.kind == GateKind::AmplitudePrep {
            (0..circuit.n_qubits()).collect()
        } else {
            op.wires.clone()
        };
        let at = wires.iter().map(|&w| level[w]).max().unwrap_or(0) + 1;
        for w in wires {
            level[w] = at;
        }
        for b in &op.bindings {
            if let Binding::Trainable(s) = b {
                trainable[*s] = true;
            }
        }
    }
    report.depth = level.into_iter().max().unwrap_or(0);
    report.serial_depth = report.total_gates;
    report.trainable_params = trainable.into_iter().filter(|&t| t).count();
    report
}

/// Same as [`complexity_metrics`] with the layer count filled in.
pub(crate) fn with_layers(circuit: &Circuit, layers: usize) -> ComplexityReport {
    ComplexityReport {
        layers,
        ..complexity_metrics(circuit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::GateOp;

    #[test]
    fn empty_circuit() {
        let c = Circuit::new(4, Vec::new()).unwrap();
        assert_eq!(complexity_metrics(&c), ComplexityReport::default());
    }

    #[test]
    fn gates_sharing_wire_zero_serialize() {
        let ops = vec![
            GateOp::cnot(0, 1),
            GateOp::single(GateKind::Rx, 0, vec![Binding::Constant(0.1)]),
            GateOp::cnot(2, 0),
            GateOp::cnot(0, 3),
        ];
        let m = complexity_metrics(&Circuit::new(4, ops).unwrap());
        assert_eq!(m.depth, m.total_gates);
        assert_eq!(m.two_qubit_gates, 3);
    }

    #[test]
    fn disjoint_gates_share_a_level() {
        let ops = (0..4)
            .map(|w| GateOp::single(GateKind::Ry, w, vec![Binding::Trainable(w)]))
            .collect();
        let m = complexity_metrics(&Circuit::new(4, ops).unwrap());
        assert_eq!((m.depth, m.total_gates, m.trainable_params), (1, 4, 4));
    }
}
