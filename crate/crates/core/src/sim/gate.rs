use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// The closed set of gates understood by the simulator.
///
/// Rotation conventions: `RX(θ) = exp(-iθX/2)`, `RY(θ) = exp(-iθY/2)`,
/// `RZ(θ) = exp(-iθZ/2)` and `Rot3(φ, θ, ω) = RZ(ω)·RY(θ)·RZ(φ)`. Controlled
/// rotations apply the corresponding single-qubit rotation to the target when
/// the control wire is `|1⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    Rot3,
    Cnot,
    Crx,
    Cry,
    Crz,
    /// Overwrites the register with a normalized real amplitude vector. Only
    /// valid as the first operation of a circuit.
    AmplitudePrep,
}

impl GateKind {
    /// Number of angle (or amplitude) values the gate consumes on a register of
    /// `n_qubits` wires.
    pub fn arity(self, n_qubits: usize) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz => 1,
            GateKind::Rot3 => 3,
            GateKind::Cnot => 0,
            GateKind::Crx | GateKind::Cry | GateKind::Crz => 1,
            GateKind::AmplitudePrep => 1 << n_qubits,
        }
    }

    /// Number of wires the gate acts on; `None` for the full-register prep.
    pub fn n_wires(self) -> Option<usize> {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::Rot3 => Some(1),
            GateKind::Cnot | GateKind::Crx | GateKind::Cry | GateKind::Crz => Some(2),
            GateKind::AmplitudePrep => None,
        }
    }

    pub fn is_two_qubit(self) -> bool {
        self.n_wires() == Some(2)
    }

    /// Controlled rotations have generator eigenvalues {0, ±1/2} and need the
    /// four-term shift rule instead of the two-term one.
    pub fn is_controlled_rotation(self) -> bool {
        matches!(self, GateKind::Crx | GateKind::Cry | GateKind::Crz)
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::Rot3 => "rot3",
            GateKind::Cnot => "cnot",
            GateKind::Crx => "crx",
            GateKind::Cry => "cry",
            GateKind::Crz => "crz",
            GateKind::AmplitudePrep => "amp",
        }
    }

    pub const ALL: [GateKind; 9] = [
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::Rot3,
        GateKind::Cnot,
        GateKind::Crx,
        GateKind::Cry,
        GateKind::Crz,
        GateKind::AmplitudePrep,
    ];
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Row-major 2×2 complex matrix.
pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub(crate) fn rx(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    let mis = Complex64::new(0.0, -s);
    [[Complex64::new(c, 0.0), mis], [mis, Complex64::new(c, 0.0)]]
}

pub(crate) fn ry(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

pub(crate) fn rz(theta: f64) -> Mat2 {
    let half = theta / 2.0;
    [
        [Complex64::from_polar(1.0, -half), ZERO],
        [ZERO, Complex64::from_polar(1.0, half)],
    ]
}

pub(crate) fn pauli_x() -> Mat2 {
    [[ZERO, ONE], [ONE, ZERO]]
}

pub(crate) fn matmul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub(crate) fn adjoint2(m: &Mat2) -> Mat2 {
    [
        [m[0][0].conj(), m[1][0].conj()],
        [m[0][1].conj(), m[1][1].conj()],
    ]
}

/// The 2×2 matrix acting on the target wire for every non-prep gate kind.
/// For controlled kinds this is the matrix applied when the control is set.
pub(crate) fn target_matrix(kind: GateKind, angles: &[f64]) -> Result<Mat2> {
    let need = kind.arity(1);
    if kind == GateKind::AmplitudePrep {
        return Err(Error::Internal("amplitude prep has no 2x2 matrix".into()));
    }
    if angles.len() != need {
        return Err(Error::Internal(format!(
            "{kind} expects {need} resolved angles, got {}",
            angles.len()
        )));
    }
    Ok(match kind {
        GateKind::Rx | GateKind::Crx => rx(angles[0]),
        GateKind::Ry | GateKind::Cry => ry(angles[0]),
        GateKind::Rz | GateKind::Crz => rz(angles[0]),
        GateKind::Rot3 => matmul2(&rz(angles[2]), &matmul2(&ry(angles[1]), &rz(angles[0]))),
        GateKind::Cnot => pauli_x(),
        GateKind::AmplitudePrep => unreachable!(),
    })
}
