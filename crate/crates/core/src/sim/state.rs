use num_complex::Complex64;

use super::gate::{adjoint2, target_matrix, GateKind, Mat2};
use super::op::GateOp;
use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 20;

/// Pure state of an `n`-qubit register.
///
/// Amplitudes are stored flat, indexed by computational basis state, with
/// wire 0 as the most significant bit: on 3 qubits, index `0b100` is
/// `|1⟩⊗|0⟩⊗|0⟩`, i.e. wire 0 set.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_width(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::config(format!(
            "register width {n_qubits} outside 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

impl StateVector {
    /// `|0…0⟩` on `n_qubits` wires.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        check_width(n_qubits)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    /// Wrap an explicit amplitude vector. The length must be a power of two
    /// and the norm must be 1 within 1e-10.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let n_qubits = amps.len().trailing_zeros() as usize;
        if !amps.len().is_power_of_two() {
            return Err(Error::config(format!(
                "amplitude count {} is not a power of two",
                amps.len()
            )));
        }
        check_width(n_qubits)?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Degenerate(format!("state norm {norm} is not 1")));
        }
        Ok(StateVector { n_qubits, amps })
    }

    /// Amplitude embedding: `values / ‖values‖₂` as real amplitudes.
    pub fn prepare_amplitude_state(values: &[f64]) -> Result<Self> {
        let n_qubits = values.len().trailing_zeros() as usize;
        if !values.len().is_power_of_two() {
            return Err(Error::config(format!(
                "amplitude embedding needs a power-of-two length, got {}",
                values.len()
            )));
        }
        check_width(n_qubits)?;
        let mut state = StateVector {
            n_qubits,
            amps: vec![Complex64::new(0.0, 0.0); values.len()],
        };
        state.overwrite_real(values)?;
        Ok(state)
    }

    fn overwrite_real(&mut self, values: &[f64]) -> Result<()> {
        if values.len() != self.amps.len() {
            return Err(Error::config(format!(
                "amplitude prep on {} qubits needs {} values, got {}",
                self.n_qubits,
                self.amps.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("non-finite amplitude value".into()));
        }
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Degenerate(
                "cannot amplitude-encode an all-zero vector".into(),
            ));
        }
        for (a, v) in self.amps.iter_mut().zip(values) {
            *a = Complex64::new(v / norm, 0.0);
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    #[inline]
    fn bit(&self, wire: usize) -> usize {
        1 << (self.n_qubits - 1 - wire)
    }

    fn check_wire(&self, wire: usize) -> Result<()> {
        if wire >= self.n_qubits {
            return Err(Error::config(format!(
                "wire {wire} out of range for {} qubits",
                self.n_qubits
            )));
        }
        Ok(())
    }

    /// `⟨ψ|Z_wire|ψ⟩`.
    pub fn expectation_z(&self, wire: usize) -> Result<f64> {
        self.check_wire(wire)?;
        let bit = self.bit(wire);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| if i & bit == 0 { a.norm_sqr() } else { -a.norm_sqr() })
            .sum())
    }

    /// `⟨Z⟩` for every wire in order.
    pub fn expectations_z(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_qubits];
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            for (w, o) in out.iter_mut().enumerate() {
                if i & self.bit(w) == 0 {
                    *o += p;
                } else {
                    *o -= p;
                }
            }
        }
        out
    }

    /// Multiply every amplitude whose `wire` bit is set by −1 (the action of `Z`).
    pub(crate) fn apply_z(&mut self, wire: usize) {
        let bit = self.bit(wire);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & bit != 0 {
                *a = -*a;
            }
        }
    }

    /// Multiply amplitude `i` by `Σ_w weights[w]·z_w(i)`, i.e. apply the
    /// observable `Σ_w weights[w]·Z_w`.
    pub(crate) fn apply_weighted_z(&mut self, weights: &[f64]) {
        let bits: Vec<usize> = (0..self.n_qubits).map(|w| self.bit(w)).collect();
        for (i, a) in self.amps.iter_mut().enumerate() {
            let f: f64 = bits
                .iter()
                .zip(weights)
                .map(|(&b, &c)| if i & b == 0 { c } else { -c })
                .sum();
            *a *= f;
        }
    }

    /// `Im⟨self|G|psi⟩` where `G` is the Pauli `pauli` on `target`, restricted
    /// to the control-set subspace when `control` is given.
    pub(crate) fn generator_overlap(
        &self,
        psi: &StateVector,
        pauli: GateKind,
        target: usize,
        control: Option<usize>,
    ) -> f64 {
        let tbit = self.bit(target);
        let cbit = control.map_or(0, |c| self.bit(c));
        let i_unit = Complex64::new(0.0, 1.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, l) in self.amps.iter().enumerate() {
            if i & cbit != cbit {
                continue;
            }
            let upper = i & tbit != 0;
            let g_psi = match pauli {
                GateKind::Rz => {
                    if upper {
                        -psi.amps[i]
                    } else {
                        psi.amps[i]
                    }
                }
                GateKind::Rx => psi.amps[i ^ tbit],
                GateKind::Ry => {
                    if upper {
                        i_unit * psi.amps[i ^ tbit]
                    } else {
                        -i_unit * psi.amps[i ^ tbit]
                    }
                }
                _ => unreachable!("generators are named by their rotation kind"),
            };
            acc += l.conj() * g_psi;
        }
        acc.im
    }

    fn apply_1q(&mut self, wire: usize, m: &Mat2) {
        let stride = self.bit(wire);
        let dim = self.amps.len();
        let mut base = 0;
        while base < dim {
            for i0 in base..base + stride {
                let i1 = i0 + stride;
                let (a0, a1) = (self.amps[i0], self.amps[i1]);
                self.amps[i0] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i1] = m[1][0] * a0 + m[1][1] * a1;
            }
            base += 2 * stride;
        }
    }

    fn apply_controlled(&mut self, control: usize, target: usize, m: &Mat2) {
        let cbit = self.bit(control);
        let tbit = self.bit(target);
        for i0 in 0..self.amps.len() {
            if i0 & cbit == 0 || i0 & tbit != 0 {
                continue;
            }
            let i1 = i0 | tbit;
            let (a0, a1) = (self.amps[i0], self.amps[i1]);
            self.amps[i0] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[i1] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    fn check_gate(&self, gate: &GateOp, angles: &[f64]) -> Result<()> {
        for &w in &gate.wires {
            self.check_wire(w)?;
        }
        match gate.kind.n_wires() {
            Some(n) if gate.wires.len() != n => {
                return Err(Error::config(format!(
                    "{} needs {n} wires, got {}",
                    gate.kind,
                    gate.wires.len()
                )))
            }
            Some(2) if gate.wires[0] == gate.wires[1] => {
                return Err(Error::config(format!(
                    "{} control and target coincide on wire {}",
                    gate.kind, gate.wires[0]
                )))
            }
            _ => {}
        }
        let need = gate.kind.arity(self.n_qubits);
        if angles.len() != need {
            return Err(Error::Internal(format!(
                "{} expects {need} resolved values, got {}",
                gate.kind,
                angles.len()
            )));
        }
        Ok(())
    }

    /// Apply `gate` with fully resolved angles (or amplitude values for prep).
    pub fn apply(&mut self, gate: &GateOp, angles: &[f64]) -> Result<()> {
        self.check_gate(gate, angles)?;
        if gate.kind == GateKind::AmplitudePrep {
            if gate.wires.len() != self.n_qubits || gate.wires.iter().enumerate().any(|(i, &w)| i != w)
            {
                return Err(Error::config("amplitude prep must span the register in wire order"));
            }
            return self.overwrite_real(angles);
        }
        let m = target_matrix(gate.kind, angles)?;
        self.apply_matrix(gate, &m);
        Ok(())
    }

    /// Apply the inverse of `gate`. Amplitude prep has no inverse.
    pub fn apply_adjoint(&mut self, gate: &GateOp, angles: &[f64]) -> Result<()> {
        self.check_gate(gate, angles)?;
        if gate.kind == GateKind::AmplitudePrep {
            return Err(Error::Internal("amplitude prep is not invertible".into()));
        }
        let m = adjoint2(&target_matrix(gate.kind, angles)?);
        self.apply_matrix(gate, &m);
        Ok(())
    }

    fn apply_matrix(&mut self, gate: &GateOp, m: &Mat2) {
        if gate.kind.is_two_qubit() {
            self.apply_controlled(gate.wires[0], gate.wires[1], m);
        } else {
            self.apply_1q(gate.wires[0], m);
        }
    }
}

/// Functional form of [`StateVector::apply`].
pub fn apply_gate(mut state: StateVector, gate: &GateOp, angles: &[f64]) -> Result<StateVector> {
    state.apply(gate, angles)?;
    Ok(state)
}

/// Rotate the global phase so the first amplitude with modulus above `1e-14`
/// is real and positive.
pub fn canonical_phase(amps: &[Complex64]) -> Vec<Complex64> {
    let phase = amps
        .iter()
        .find(|a| a.norm() > 1e-14)
        .map(|a| a.conj() / a.norm())
        .unwrap_or(Complex64::new(1.0, 0.0));
    amps.iter().map(|a| a * phase).collect()
}

/// Largest amplitude-wise distance after fixing both global phases.
pub fn max_phase_aligned_deviation(a: &[Complex64], b: &[Complex64]) -> f64 {
    let (a, b) = (canonical_phase(a), canonical_phase(b));
    a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::op::Binding;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn ry(wire: usize) -> GateOp {
        GateOp::single(GateKind::Ry, wire, vec![Binding::Trainable(0)])
    }

    #[test]
    fn rx_zero_is_identity() {
        let mut s = StateVector::zero(2).unwrap();
        s.apply(&ry(0), &[0.7]).unwrap();
        let before = s.clone();
        s.apply(&GateOp::single(GateKind::Rx, 1, vec![Binding::Trainable(0)]), &[0.0])
            .unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn ry_half_pi_gives_zero_z() {
        let s = apply_gate(StateVector::zero(1).unwrap(), &ry(0), &[FRAC_PI_2]).unwrap();
        assert!(s.expectation_z(0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn cnot_makes_bell_state() {
        let s = StateVector::from_amplitudes(vec![c(FRAC_1_SQRT_2), c(0.0), c(FRAC_1_SQRT_2), c(0.0)])
            .unwrap();
        let s = apply_gate(s, &GateOp::cnot(0, 1), &[]).unwrap();
        let want = [c(FRAC_1_SQRT_2), c(0.0), c(0.0), c(FRAC_1_SQRT_2)];
        for (a, b) in s.amplitudes().iter().zip(want) {
            assert!((a - b).norm() < 1e-15);
        }
        assert!(s.expectation_z(0).unwrap().abs() < 1e-15);
        assert!(s.expectation_z(1).unwrap().abs() < 1e-15);
    }

    #[test]
    fn basis_expectations() {
        let zero = StateVector::zero(1).unwrap();
        assert_eq!(zero.expectation_z(0).unwrap(), 1.0);
        let one = StateVector::from_amplitudes(vec![c(0.0), c(1.0)]).unwrap();
        assert_eq!(one.expectation_z(0).unwrap(), -1.0);
    }

    #[test]
    fn wire_zero_is_most_significant() {
        let mut s = StateVector::zero(3).unwrap();
        s.apply(&GateOp::single(GateKind::Rx, 0, vec![Binding::Constant(PI)]), &[PI])
            .unwrap();
        assert!((s.amplitudes()[0b100].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn amplitude_prep_values() {
        let s = StateVector::prepare_amplitude_state(&[3.0, 4.0, 0.0, 0.0]).unwrap();
        let re: Vec<f64> = s.amplitudes().iter().map(|a| a.re).collect();
        assert_eq!(re, vec![0.6, 0.8, 0.0, 0.0]);

        let s = StateVector::prepare_amplitude_state(&[0.25; 16]).unwrap();
        assert_eq!(s.n_qubits(), 4);
        for p in s.probabilities() {
            assert!((p - 1.0 / 16.0).abs() < 1e-15);
        }

        let mut basis = vec![0.0; 8];
        basis[0] = 1.0;
        assert_eq!(
            StateVector::prepare_amplitude_state(&basis).unwrap(),
            StateVector::zero(3).unwrap()
        );
    }

    #[test]
    fn amplitude_prep_rejects_zero_vector() {
        assert!(matches!(
            StateVector::prepare_amplitude_state(&[0.0; 4]),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            StateVector::prepare_amplitude_state(&[1.0; 3]),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn wire_out_of_range_is_config_error() {
        let s = StateVector::zero(2).unwrap();
        assert!(matches!(s.expectation_z(2), Err(Error::Config(_))));
        assert!(matches!(
            apply_gate(s.clone(), &ry(5), &[0.1]),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            apply_gate(s, &GateOp::cnot(1, 1), &[]),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn unresolved_angles_are_internal_error() {
        let s = StateVector::zero(2).unwrap();
        assert!(matches!(apply_gate(s, &ry(0), &[]), Err(Error::Internal(_))));
    }

    #[test]
    fn adjoint_undoes_gate() {
        let mut s = StateVector::prepare_amplitude_state(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let before = s.clone();
        let g = GateOp::single(
            GateKind::Rot3,
            1,
            vec![Binding::Trainable(0), Binding::Trainable(1), Binding::Trainable(2)],
        );
        s.apply(&g, &[0.3, 1.1, -0.4]).unwrap();
        s.apply_adjoint(&g, &[0.3, 1.1, -0.4]).unwrap();
        assert!(max_phase_aligned_deviation(s.amplitudes(), before.amplitudes()) < 1e-15);
    }
}
