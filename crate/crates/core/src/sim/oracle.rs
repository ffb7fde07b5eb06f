//! Brute-force dense-matrix reference for the statevector simulator.
//!
//! Every gate is built from Pauli matrices as `cos(θ/2)·I − i·sin(θ/2)·P`,
//! Kronecker-lifted to the full register, and multiplied in circuit order.
//! Nothing here shares code with the strided update in [`super::state`].

use num_complex::Complex64;

use super::gate::GateKind;
use crate::circuit::Circuit;
use crate::error::{Error, Result};

pub const ORACLE_QUBIT_LIMIT: usize = 6;

/// Square row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        DenseMatrix { dim, data }
    }

    fn from_rows(rows: &[&[Complex64]]) -> Self {
        let dim = rows.len();
        DenseMatrix {
            dim,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn kron(&self, other: &DenseMatrix) -> DenseMatrix {
        let dim = self.dim * other.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self.get(i, j);
                for k in 0..other.dim {
                    for l in 0..other.dim {
                        data[(i * other.dim + k) * dim + j * other.dim + l] = a * other.get(k, l);
                    }
                }
            }
        }
        DenseMatrix { dim, data }
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        let n = self.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                for j in 0..n {
                    data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        DenseMatrix { dim: n, data }
    }

    pub fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        DenseMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> DenseMatrix {
        DenseMatrix {
            dim: self.dim,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }
}

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pauli(axis: char) -> DenseMatrix {
    let (o, l, i) = (cx(0.0, 0.0), cx(1.0, 0.0), cx(0.0, 1.0));
    match axis {
        'x' => DenseMatrix::from_rows(&[&[o, l], &[l, o]]),
        'y' => DenseMatrix::from_rows(&[&[o, -i], &[i, o]]),
        'z' => DenseMatrix::from_rows(&[&[l, o], &[o, -l]]),
        _ => DenseMatrix::identity(2),
    }
}

/// `exp(−iθP/2) = cos(θ/2)·I − i·sin(θ/2)·P`.
fn rotation(axis: char, theta: f64) -> DenseMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    DenseMatrix::identity(2)
        .scale(cx(c, 0.0))
        .add(&pauli(axis).scale(cx(0.0, -s)))
}

fn projector(bit: usize) -> DenseMatrix {
    let (o, l) = (cx(0.0, 0.0), cx(1.0, 0.0));
    if bit == 0 {
        DenseMatrix::from_rows(&[&[l, o], &[o, o]])
    } else {
        DenseMatrix::from_rows(&[&[o, o], &[o, l]])
    }
}

/// Tensor product of per-wire factors, wire 0 leftmost (most significant).
fn lift(n_qubits: usize, factors: &[(usize, &DenseMatrix)]) -> DenseMatrix {
    let id = DenseMatrix::identity(2);
    let mut acc = DenseMatrix::identity(1);
    for w in 0..n_qubits {
        let f = factors
            .iter()
            .find(|(fw, _)| *fw == w)
            .map(|(_, m)| *m)
            .unwrap_or(&id);
        acc = acc.kron(f);
    }
    acc
}

fn local_matrix(kind: GateKind, angles: &[f64]) -> Result<DenseMatrix> {
    Ok(match kind {
        GateKind::Rx | GateKind::Crx => rotation('x', angles[0]),
        GateKind::Ry | GateKind::Cry => rotation('y', angles[0]),
        GateKind::Rz | GateKind::Crz => rotation('z', angles[0]),
        GateKind::Rot3 => rotation('z', angles[2])
            .matmul(&rotation('y', angles[1]))
            .matmul(&rotation('z', angles[0])),
        GateKind::Cnot => pauli('x'),
        GateKind::AmplitudePrep => {
            return Err(Error::config("amplitude prep is not a unitary gate"))
        }
    })
}

/// Full-register matrix of one gate.
pub fn lifted_gate(
    n_qubits: usize,
    kind: GateKind,
    wires: &[usize],
    angles: &[f64],
) -> Result<DenseMatrix> {
    let local = local_matrix(kind, angles)?;
    if kind.is_two_qubit() {
        let (p0, p1) = (projector(0), projector(1));
        let off = lift(n_qubits, &[(wires[0], &p0)]);
        let on = lift(n_qubits, &[(wires[0], &p1), (wires[1], &local)]);
        Ok(off.add(&on))
    } else {
        Ok(lift(n_qubits, &[(wires[0], &local)]))
    }
}

/// Product of all lifted gate matrices, in circuit order. Circuits that start
/// with amplitude prep are rejected; use [`oracle_state`] for those.
pub fn dense_unitary_oracle(circuit: &Circuit, features: &[f64], params: &[f64]) -> Result<DenseMatrix> {
    let n = circuit.n_qubits();
    if n > ORACLE_QUBIT_LIMIT {
        return Err(Error::SizeLimit {
            n_qubits: n,
            limit: ORACLE_QUBIT_LIMIT,
        });
    }
    let mut u = DenseMatrix::identity(1 << n);
    for op in circuit.ops() {
        let angles = op.resolve(features, params);
        u = lifted_gate(n, op.kind, &op.wires, &angles)?.matmul(&u);
    }
    Ok(u)
}

/// Oracle output state: the prepared (or `|0…0⟩`) input times the dense
/// product of the remaining gates.
pub fn oracle_state(circuit: &Circuit, features: &[f64], params: &[f64]) -> Result<Vec<Complex64>> {
    let n = circuit.n_qubits();
    if n > ORACLE_QUBIT_LIMIT {
        return Err(Error::SizeLimit {
            n_qubits: n,
            limit: ORACLE_QUBIT_LIMIT,
        });
    }
    let dim = 1 << n;
    let mut ops = circuit.ops();
    let mut input = vec![cx(0.0, 0.0); dim];
    input[0] = cx(1.0, 0.0);
    if let Some(first) = ops.first().filter(|op| op.kind == GateKind::AmplitudePrep) {
        let values = first.resolve(features, params);
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Degenerate("all-zero amplitude vector".into()));
        }
        input = values.iter().map(|v| cx(v / norm, 0.0)).collect();
        ops = &ops[1..];
    }
    let mut u = DenseMatrix::identity(dim);
    for op in ops {
        let angles = op.resolve(features, params);
        u = lifted_gate(n, op.kind, &op.wires, &angles)?.matmul(&u);
    }
    Ok(u.apply(&input))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::op::GateOp;

    #[test]
    fn empty_circuit_is_identity() {
        let c = Circuit::new(3, Vec::new()).unwrap();
        assert_eq!(dense_unitary_oracle(&c, &[], &[]).unwrap(), DenseMatrix::identity(8));
    }

    #[test]
    fn cnot_is_permutation() {
        let c = Circuit::new(2, vec![GateOp::cnot(0, 1)]).unwrap();
        let u = dense_unitary_oracle(&c, &[], &[]).unwrap();
        let perm = [0usize, 1, 3, 2];
        for (row, &col) in perm.iter().enumerate() {
            for j in 0..4 {
                let want = if j == col { 1.0 } else { 0.0 };
                assert_eq!(u.get(row, j), cx(want, 0.0));
            }
        }
    }

    #[test]
    fn size_limit() {
        let c = Circuit::new(7, Vec::new()).unwrap();
        assert!(matches!(
            dense_unitary_oracle(&c, &[], &[]),
            Err(Error::SizeLimit { n_qubits: 7, .. })
        ));
    }
}
