//! Gradients of circuit readouts and hybrid-model losses.
//!
//! Quantum derivatives go through the parameter-shift rule, one shifted pair
//! per gate occurrence, accumulated per slot in circuit order:
//!
//! * `RX`, `RY`, `RZ` and each `Rot3` angle have generator eigenvalues `±1/2`:
//!   `∂E = [E(θ + π/2) − E(θ − π/2)] / 2`;
//! * `CRX`, `CRY`, `CRZ` have eigenvalues `{0, ±1/2}` and use the four-term rule
//!   `∂E = c₊[E(θ + π/2) − E(θ − π/2)] − c₋[E(θ + 3π/2) − E(θ − 3π/2)]`
//!   with `c± = (√2 ± 1) / (4√2)`.
//!
//! Derivatives with respect to amplitude-encoded inputs use the analytic
//! Jacobian of `v ↦ v/‖v‖` together with one adjoint sweep per readout wire.
//!
//! Training does not need the full Jacobian, only its contraction with the
//! loss sensitivities `c_w = ∂L/∂⟨Z_w⟩`. [`circuit_vjp`] gets that from a single
//! backward sweep of the observable `Σ c_w Z_w`, and is checked against the
//! shift rule in the tests.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::model::HybridModel;
use crate::sim::{Binding, GateKind, GateOp, StateVector};

/// Gradient aligned index-for-index with a model's flat parameter store.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientVector(pub Vec<f64>);

impl GradientVector {
    pub fn zeros(len: usize) -> Self {
        GradientVector(vec![0.0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub(crate) fn ensure_finite(&self) -> Result<()> {
        match self.0.iter().position(|g| !g.is_finite()) {
            Some(i) => Err(Error::numerical(format!("non-finite gradient entry {i}"))),
            None => Ok(()),
        }
    }
}

/// All `⟨Z_w⟩` readouts of a circuit and their derivatives.
#[derive(Clone, Debug)]
pub struct CircuitJacobian {
    /// `⟨Z_w⟩` per wire.
    pub outputs: Vec<f64>,
    /// `∂⟨Z_w⟩/∂θ_k`, indexed `[k][w]`.
    pub d_params: Vec<Vec<f64>>,
    /// `∂⟨Z_w⟩/∂x_f`, indexed `[f][w]`; empty unless requested.
    pub d_features: Vec<Vec<f64>>,
}

const FOUR_TERM_PLUS: f64 = (SQRT_2 + 1.0) / (4.0 * SQRT_2);
const FOUR_TERM_MINUS: f64 = (SQRT_2 - 1.0) / (4.0 * SQRT_2);

fn finite_readout(values: Vec<f64>) -> Result<Vec<f64>> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::numerical("non-finite expectation value"));
    }
    Ok(values)
}

struct Sweep<'a> {
    circuit: &'a Circuit,
    /// `prefix[i]` is the state just before op `i`.
    prefix: Vec<StateVector>,
    resolved: Vec<Vec<f64>>,
}

impl<'a> Sweep<'a> {
    fn new(circuit: &'a Circuit, features: &'a [f64], params: &'a [f64]) -> Result<(Self, StateVector)> {
        circuit.check_inputs(features, params)?;
        let mut state = StateVector::zero(circuit.n_qubits())?;
        let mut prefix = Vec::with_capacity(circuit.ops().len());
        let mut resolved = Vec::with_capacity(circuit.ops().len());
        for op in circuit.ops() {
            let angles = op.resolve(features, params);
            prefix.push(state.clone());
            state.apply(op, &angles)?;
            resolved.push(angles);
        }
        Ok((
            Sweep {
                circuit,
                prefix,
                resolved,
            },
            state,
        ))
    }

    /// Readouts with angle `j` of op `i` moved by `delta`.
    fn shifted(&self, i: usize, j: usize, delta: f64) -> Result<Vec<f64>> {
        let ops = self.circuit.ops();
        let mut state = self.prefix[i].clone();
        let mut angles = self.resolved[i].clone();
        angles[j] += delta;
        state.apply(&ops[i], &angles)?;
        for (op, angles) in ops[i + 1..].iter().zip(&self.resolved[i + 1..]) {
            state.apply(op, angles)?;
        }
        finite_readout(state.expectations_z())
    }

    /// `∂⟨Z_w⟩/∂(angle j of op i)` for every wire.
    fn shift_derivative(&self, i: usize, j: usize) -> Result<Vec<f64>> {
        let plus = self.shifted(i, j, FRAC_PI_2)?;
        let minus = self.shifted(i, j, -FRAC_PI_2)?;
        if self.circuit.ops()[i].kind.is_controlled_rotation() {
            let plus3 = self.shifted(i, j, 3.0 * FRAC_PI_2)?;
            let minus3 = self.shifted(i, j, -3.0 * FRAC_PI_2)?;
            Ok((0..plus.len())
                .map(|w| {
                    FOUR_TERM_PLUS * (plus[w] - minus[w]) - FOUR_TERM_MINUS * (plus3[w] - minus3[w])
                })
                .collect())
        } else {
            Ok(plus.iter().zip(&minus).map(|(p, m)| (p - m) / 2.0).collect())
        }
    }

    /// Gradient of every readout with respect to the raw amplitude-prep inputs,
    /// `[input index][wire]`.
    fn amplitude_input_derivative(&self, final_state: &StateVector) -> Result<Vec<Vec<f64>>> {
        let ops = self.circuit.ops();
        let values = &self.resolved[0];
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        let psi: Vec<f64> = values.iter().map(|v| v / norm).collect();
        let n = self.circuit.n_qubits();
        let mut out = vec![vec![0.0; n]; values.len()];
        for w in 0..n {
            let mut lambda = final_state.clone();
            lambda.apply_z(w);
            for (op, angles) in ops[1..].iter().zip(&self.resolved[1..]).rev() {
                lambda.apply_adjoint(op, angles)?;
            }
            // ψ is real, so ∂⟨ψ|M|ψ⟩/∂ψ = 2 Re(Mψ) with M = U†Z_wU.
            let g: Vec<f64> = lambda.amplitudes().iter().map(|a| 2.0 * a.re).collect();
            let radial: f64 = g.iter().zip(&psi).map(|(a, b)| a * b).sum();
            for (k, row) in out.iter_mut().enumerate() {
                row[w] = (g[k] - psi[k] * radial) / norm;
            }
        }
        Ok(out)
    }
}

/// Which rule [`HybridModel::backward_with`] uses for circuit derivatives.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GradientMethod {
    /// One backward sweep of the loss-weighted observable.
    #[default]
    Adjoint,
    /// Shifted re-evaluations per gate occurrence; the reference path.
    ParameterShift,
}

/// Contraction of the circuit Jacobian with readout weights.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitVjp {
    /// `Σ_w c_w ∂⟨Z_w⟩/∂θ_k`.
    pub d_params: Vec<f64>,
    /// `Σ_w c_w ∂⟨Z_w⟩/∂x_f`; empty unless requested.
    pub d_features: Vec<f64>,
}

fn add_binding(b: &Binding, d: f64, out: &mut CircuitVjp, with_features: bool) {
    match *b {
        Binding::Trainable(k) => out.d_params[k] += d,
        Binding::Feature { slot, scale } if with_features => out.d_features[slot] += scale * d,
        _ => {}
    }
}

/// `Σ_w weights[w]·∇⟨Z_w⟩` by reverse-mode sweep from `final_state`, the
/// state [`Circuit::run`] returns for the same inputs.
pub fn circuit_vjp(
    circuit: &Circuit,
    features: &[f64],
    params: &[f64],
    final_state: &StateVector,
    weights: &[f64],
    with_features: bool,
) -> Result<CircuitVjp> {
    circuit.check_inputs(features, params)?;
    let n = circuit.n_qubits();
    if weights.len() != n || final_state.n_qubits() != n {
        return Err(Error::config(format!(
            "vjp needs {n} weights and a {n}-qubit state, got {} and {}",
            weights.len(),
            final_state.n_qubits()
        )));
    }
    let mut out = CircuitVjp {
        d_params: vec![0.0; circuit.trainable_slots()],
        d_features: if with_features {
            vec![0.0; circuit.feature_slots()]
        } else {
            Vec::new()
        },
    };
    let mut psi = final_state.clone();
    let mut lambda = final_state.clone();
    lambda.apply_weighted_z(weights);
    for op in circuit.ops().iter().rev() {
        let angles = op.resolve(features, params);
        match op.kind {
            GateKind::AmplitudePrep => {
                if with_features {
                    // ψ is the normalized real input; ∂⟨M⟩/∂ψ = 2 Re(λ).
                    let norm = angles.iter().map(|v| v * v).sum::<f64>().sqrt();
                    let g: Vec<f64> = lambda.amplitudes().iter().map(|a| 2.0 * a.re).collect();
                    let unit: Vec<f64> = angles.iter().map(|v| v / norm).collect();
                    let radial: f64 = g.iter().zip(&unit).map(|(a, b)| a * b).sum();
                    for (k, b) in op.bindings.iter().enumerate() {
                        add_binding(b, (g[k] - unit[k] * radial) / norm, &mut out, true);
                    }
                }
                break;
            }
            GateKind::Cnot => {}
            GateKind::Rx | GateKind::Ry | GateKind::Rz => {
                let d = lambda.generator_overlap(&psi, op.kind, op.wires[0], None);
                add_binding(&op.bindings[0], d, &mut out, with_features);
            }
            GateKind::Crx | GateKind::Cry | GateKind::Crz => {
                let pauli = match op.kind {
                    GateKind::Crx => GateKind::Rx,
                    GateKind::Cry => GateKind::Ry,
                    _ => GateKind::Rz,
                };
                let d = lambda.generator_overlap(&psi, pauli, op.wires[1], Some(op.wires[0]));
                add_binding(&op.bindings[0], d, &mut out, with_features);
            }
            GateKind::Rot3 => {
                // RZ(ω)·RY(θ)·RZ(φ): peel the factors off last to first
                let w = op.wires[0];
                for (j, kind) in [(2, GateKind::Rz), (1, GateKind::Ry), (0, GateKind::Rz)] {
                    let d = lambda.generator_overlap(&psi, kind, w, None);
                    add_binding(&op.bindings[j], d, &mut out, with_features);
                    let factor = GateOp::single(kind, w, vec![Binding::Constant(angles[j])]);
                    psi.apply_adjoint(&factor, &angles[j..=j])?;
                    lambda.apply_adjoint(&factor, &angles[j..=j])?;
                }
                continue;
            }
        }
        psi.apply_adjoint(op, &angles)?;
        lambda.apply_adjoint(op, &angles)?;
    }
    if out.d_params.iter().chain(&out.d_features).any(|v| !v.is_finite()) {
        return Err(Error::numerical("non-finite circuit gradient"));
    }
    Ok(out)
}

/// Readouts and their derivatives with respect to every trainable slot and,
/// when `with_features` is set, every feature slot.
pub fn circuit_jacobian(
    circuit: &Circuit,
    features: &[f64],
    params: &[f64],
    with_features: bool,
) -> Result<CircuitJacobian> {
    let (sweep, final_state) = Sweep::new(circuit, features, params)?;
    let n = circuit.n_qubits();
    let outputs = finite_readout(final_state.expectations_z())?;
    let mut d_params = vec![vec![0.0; n]; circuit.trainable_slots()];
    let mut d_features = if with_features {
        vec![vec![0.0; n]; circuit.feature_slots()]
    } else {
        Vec::new()
    };
    for (i, op) in circuit.ops().iter().enumerate() {
        if op.kind == GateKind::AmplitudePrep {
            if with_features {
                let d_inputs = sweep.amplitude_input_derivative(&final_state)?;
                for (b, row) in op.bindings.iter().zip(d_inputs) {
                    if let Binding::Feature { slot, scale } = *b {
                        for (acc, d) in d_features[slot].iter_mut().zip(row) {
                            *acc += scale * d;
                        }
                    }
                }
            }
            continue;
        }
        for (j, b) in op.bindings.iter().enumerate() {
            let (target, factor) = match *b {
                Binding::Trainable(slot) => (&mut d_params[slot], 1.0),
                Binding::Feature { slot, scale } if with_features => (&mut d_features[slot], scale),
                _ => continue,
            };
            let d = sweep.shift_derivative(i, j)?;
            for (acc, v) in target.iter_mut().zip(d) {
                *acc += factor * v;
            }
        }
    }
    Ok(CircuitJacobian {
        outputs,
        d_params,
        d_features,
    })
}

/// `∂⟨Z_wire⟩/∂θ_k` for every trainable slot `k`.
pub fn quantum_param_gradient(
    circuit: &Circuit,
    features: &[f64],
    params: &[f64],
    wire: usize,
) -> Result<Vec<f64>> {
    if wire >= circuit.n_qubits() {
        return Err(Error::config(format!(
            "wire {wire} out of range for {} qubits",
            circuit.n_qubits()
        )));
    }
    let jac = circuit_jacobian(circuit, features, params, false)?;
    Ok(jac.d_params.into_iter().map(|row| row[wire]).collect())
}

/// Max over slots and wires of `|shift − central difference| / max(1, |shift|)`
/// for a bare circuit.
pub fn circuit_finite_difference_check(
    circuit: &Circuit,
    features: &[f64],
    params: &[f64],
    h: f64,
) -> Result<f64> {
    let jac = circuit_jacobian(circuit, features, params, false)?;
    let mut worst: f64 = 0.0;
    let mut p = params.to_vec();
    for k in 0..circuit.trainable_slots() {
        p[k] = params[k] + h;
        let plus = circuit.expectations(features, &p)?;
        p[k] = params[k] - h;
        let minus = circuit.expectations(features, &p)?;
        p[k] = params[k];
        for w in 0..circuit.n_qubits() {
            let numeric = (plus[w] - minus[w]) / (2.0 * h);
            let analytic = jac.d_params[k][w];
            worst = worst.max((analytic - numeric).abs() / analytic.abs().max(1.0));
        }
    }
    Ok(worst)
}

/// Max over all model parameters of `|analytic − central difference| / max(1, |analytic|)`
/// for the loss `½(prediction − target)²`.
pub fn finite_difference_check(
    model: &HybridModel,
    features: &[f64],
    target: f64,
    h: f64,
) -> Result<f64> {
    let (_, analytic) = model.backward(features, target)?;
    let mut probe = model.clone();
    let mut worst: f64 = 0.0;
    for k in 0..model.param_count() {
        let base = model.params()[k];
        probe.params_mut()[k] = base + h;
        let plus = probe.loss(features, target)?;
        probe.params_mut()[k] = base - h;
        let minus = probe.loss(features, target)?;
        probe.params_mut()[k] = base;
        let numeric = (plus - minus) / (2.0 * h);
        let a = analytic.0[k];
        worst = worst.max((a - numeric).abs() / a.abs().max(1.0));
    }
    Ok(worst)
}
