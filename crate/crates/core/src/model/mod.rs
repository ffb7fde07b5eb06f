//! The three hybrid architectures and their flat parameter stores.
//!
//! * **Sequential**: encode 16 features on 4 qubits, run the ansatz, read `⟨Z⟩`
//!   on every wire, then a 4→1 affine output.
//! * **Parallel**: a 16→32 affine layer, the two halves of its output each
//!   through an independent 4-qubit circuit, the 8 readouts into an 8→1 output.
//! * **Ensemble**: independent sequential members, prediction is their mean.
//!
//! There is no activation anywhere; the readouts feed the output layer directly.

mod checkpoint;

use std::f64::consts::TAU;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use checkpoint::{read_checkpoint, write_checkpoint};

use crate::circuit::reference::DEFAULT_LAYERS;
use crate::circuit::{build_ansatz, AnsatzId, Circuit, Encoding, EncodingSpec};
use crate::error::{Error, Result};
use crate::grad::{circuit_jacobian, circuit_vjp, CircuitVjp, GradientMethod, GradientVector};
use crate::sim::StateVector;

/// Members in the shipped ensemble.
pub const ENSEMBLE_MEMBERS: usize = 9;

/// Width of the parallel model's expansion layer.
pub const PARALLEL_HIDDEN: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Architecture {
    Sequential,
    Parallel,
    Ensemble,
}

impl Architecture {
    pub const ALL: [Architecture; 3] = [
        Architecture::Sequential,
        Architecture::Parallel,
        Architecture::Ensemble,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Architecture::Sequential => "sequential",
            Architecture::Parallel => "parallel",
            Architecture::Ensemble => "ensemble",
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sequential" | "seq" => Ok(Architecture::Sequential),
            "parallel" | "par" => Ok(Architecture::Parallel),
            "ensemble" | "ens" => Ok(Architecture::Ensemble),
            other => Err(Error::config(format!("unknown architecture `{other}`"))),
        }
    }
}

/// Dense `out_dim × in_dim` layer whose weights (row-major) and bias live at
/// `offset` in the owning model's parameter store.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AffineLayer {
    pub in_dim: usize,
    pub out_dim: usize,
    pub offset: usize,
}

impl AffineLayer {
    pub fn param_count(&self) -> usize {
        self.out_dim * (self.in_dim + 1)
    }

    pub fn weight_range(&self) -> Range<usize> {
        self.offset..self.offset + self.out_dim * self.in_dim
    }

    pub fn bias_range(&self) -> Range<usize> {
        let start = self.offset + self.out_dim * self.in_dim;
        start..start + self.out_dim
    }

    pub fn apply(&self, store: &[f64], x: &[f64]) -> Vec<f64> {
        let w = &store[self.weight_range()];
        let b = &store[self.bias_range()];
        (0..self.out_dim)
            .map(|o| {
                let row = &w[o * self.in_dim..(o + 1) * self.in_dim];
                b[o] + row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>()
            })
            .collect()
    }

    /// Accumulate `∂L/∂W = δ·xᵀ` and `∂L/∂b = δ`; return `∂L/∂x = Wᵀ·δ`.
    fn backprop(&self, store: &[f64], x: &[f64], delta: &[f64], grad: &mut [f64]) -> Vec<f64> {
        let w = &store[self.weight_range()];
        let wr = self.weight_range();
        let br = self.bias_range();
        let mut dx = vec![0.0; self.in_dim];
        for (o, &d) in delta.iter().enumerate() {
            for i in 0..self.in_dim {
                grad[wr.start + o * self.in_dim + i] += d * x[i];
                dx[i] += w[o * self.in_dim + i] * d;
            }
            grad[br.start + o] += d;
        }
        dx
    }
}

/// A circuit followed by an output layer; the sequential model and each ensemble member.
#[derive(Clone, Debug, PartialEq)]
struct QuantumHead {
    quantum: Range<usize>,
    output: AffineLayer,
}

#[derive(Clone, Debug, PartialEq)]
enum Layout {
    Sequential(QuantumHead),
    Parallel {
        input: AffineLayer,
        branches: [Range<usize>; 2],
        output: AffineLayer,
    },
    Ensemble(Vec<QuantumHead>),
}

/// A hybrid model: structure plus one flat parameter store.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridModel {
    architecture: Architecture,
    ansatz: AnsatzId,
    encoding: EncodingSpec,
    layers: usize,
    circuit: Circuit,
    layout: Layout,
    params: Vec<f64>,
    seed: Option<u64>,
}

/// Cached intermediates of one forward pass.
struct HeadOutput {
    readout: Vec<f64>,
    prediction: f64,
}

fn check_features(features: &[f64], n: usize) -> Result<()> {
    if features.len() != n {
        return Err(Error::Input(format!(
            "expected {n} features, got {}",
            features.len()
        )));
    }
    if let Some(i) = features.iter().position(|v| !v.is_finite()) {
        return Err(Error::Input(format!("feature {i} is not finite")));
    }
    Ok(())
}

impl HybridModel {
    fn assemble(
        architecture: Architecture,
        ansatz: AnsatzId,
        encoding: EncodingSpec,
        members: usize,
    ) -> Result<Self> {
        let layers = DEFAULT_LAYERS;
        let circuit = build_ansatz(ansatz, encoding, layers)?;
        let q = circuit.trainable_slots();
        let width = circuit.n_qubits();
        let head = |offset: usize| QuantumHead {
            quantum: offset..offset + q,
            output: AffineLayer {
                in_dim: width,
                out_dim: 1,
                offset: offset + q,
            },
        };
        let head_len = q + width + 1;
        let layout = match architecture {
            Architecture::Sequential => Layout::Sequential(head(0)),
            Architecture::Ensemble => {
                if members == 0 {
                    return Err(Error::config("an ensemble needs at least one member"));
                }
                Layout::Ensemble((0..members).map(|m| head(m * head_len)).collect())
            }
            Architecture::Parallel => {
                let input = AffineLayer {
                    in_dim: encoding.n_features,
                    out_dim: 2 * encoding.n_features,
                    offset: 0,
                };
                let b0 = input.param_count();
                Layout::Parallel {
                    input,
                    branches: [b0..b0 + q, b0 + q..b0 + 2 * q],
                    output: AffineLayer {
                        in_dim: 2 * width,
                        out_dim: 1,
                        offset: b0 + 2 * q,
                    },
                }
            }
        };
        let mut model = HybridModel {
            architecture,
            ansatz,
            encoding,
            layers,
            circuit,
            layout,
            params: Vec::new(),
            seed: None,
        };
        model.params = vec![0.0; model.groups().last().map_or(0, |(_, r)| r.end)];
        Ok(model)
    }

    pub fn build(architecture: Architecture, ansatz: AnsatzId, encoding: Encoding) -> Result<Self> {
        Self::assemble(
            architecture,
            ansatz,
            EncodingSpec::standard(encoding),
            ENSEMBLE_MEMBERS,
        )
    }

    pub fn architecture(&self) -> Architecture {
        self.architecture
    }

    pub fn ansatz(&self) -> AnsatzId {
        self.ansatz
    }

    pub fn encoding(&self) -> EncodingSpec {
        self.encoding
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    /// Trainable slots of one circuit instance.
    pub fn quantum_param_count(&self) -> usize {
        self.circuit.trainable_slots()
    }

    pub fn n_members(&self) -> usize {
        match &self.layout {
            Layout::Ensemble(m) => m.len(),
            _ => 1,
        }
    }

    /// Named parameter groups in store order.
    pub fn groups(&self) -> Vec<(String, Range<usize>)> {
        let head = |prefix: &str, h: &QuantumHead| {
            vec![
                (format!("{prefix}quantum"), h.quantum.clone()),
                (format!("{prefix}output.weight"), h.output.weight_range()),
                (format!("{prefix}output.bias"), h.output.bias_range()),
            ]
        };
        match &self.layout {
            Layout::Sequential(h) => head("", h),
            Layout::Ensemble(members) => members
                .iter()
                .enumerate()
                .flat_map(|(i, h)| head(&format!("member{i}."), h))
                .collect(),
            Layout::Parallel {
                input,
                branches,
                output,
            } => vec![
                ("input.weight".into(), input.weight_range()),
                ("input.bias".into(), input.bias_range()),
                ("branch0.quantum".into(), branches[0].clone()),
                ("branch1.quantum".into(), branches[1].clone()),
                ("output.weight".into(), output.weight_range()),
                ("output.bias".into(), output.bias_range()),
            ],
        }
    }

    /// Quantum angles `~ U[0, 2π)`, affine weights `~ U(−1/√in, 1/√in)`, biases 0.
    pub fn init_parameters(&mut self, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut affine = Vec::new();
        match &self.layout {
            Layout::Sequential(h) => affine.push(h.output),
            Layout::Ensemble(members) => affine.extend(members.iter().map(|h| h.output)),
            Layout::Parallel { input, output, .. } => affine.extend([*input, *output]),
        }
        for (name, range) in self.groups() {
            if name.ends_with("quantum") {
                for p in &mut self.params[range] {
                    *p = rng.random_range(0.0..TAU);
                }
            } else if name.ends_with("bias") {
                self.params[range].fill(0.0);
            } else {
                let layer = affine
                    .iter()
                    .find(|l| l.weight_range() == range)
                    .expect("weight group belongs to a layer");
                let bound = 1.0 / (layer.in_dim as f64).sqrt();
                for p in &mut self.params[range] {
                    *p = rng.random_range(-bound..bound);
                }
            }
        }
        self.seed = Some(seed);
    }

    fn head_forward(&self, head: &QuantumHead, features: &[f64]) -> Result<HeadOutput> {
        let readout = self
            .circuit
            .expectations(features, &self.params[head.quantum.clone()])?;
        let prediction = head.output.apply(&self.params, &readout)[0];
        Ok(HeadOutput {
            readout,
            prediction,
        })
    }

    fn branch_inputs<'a>(&self, hidden: &'a [f64]) -> [&'a [f64]; 2] {
        let half = hidden.len() / 2;
        [&hidden[..half], &hidden[half..]]
    }

    /// Predicted binding energy for one 16-feature sample.
    pub fn forward(&self, features: &[f64]) -> Result<f64> {
        check_features(features, self.encoding.n_features)?;
        let prediction = match &self.layout {
            Layout::Sequential(h) => self.head_forward(h, features)?.prediction,
            Layout::Ensemble(members) => {
                let mut sum = 0.0;
                for h in members {
                    sum += self.head_forward(h, features)?.prediction;
                }
                sum / members.len() as f64
            }
            Layout::Parallel {
                input,
                branches,
                output,
            } => {
                let hidden = input.apply(&self.params, features);
                let mut readout = Vec::with_capacity(output.in_dim);
                for (x, range) in self.branch_inputs(&hidden).into_iter().zip(branches) {
                    readout.extend(self.circuit.expectations(x, &self.params[range.clone()])?);
                }
                output.apply(&self.params, &readout)[0]
            }
        };
        if !prediction.is_finite() {
            return Err(Error::numerical("non-finite prediction"));
        }
        Ok(prediction)
    }

    /// Per-member predictions; a single entry for non-ensemble models.
    pub fn member_predictions(&self, features: &[f64]) -> Result<Vec<f64>> {
        check_features(features, self.encoding.n_features)?;
        match &self.layout {
            Layout::Ensemble(members) => members
                .iter()
                .map(|h| Ok(self.head_forward(h, features)?.prediction))
                .collect(),
            _ => Ok(vec![self.forward(features)?]),
        }
    }

    /// The readouts of every circuit instance, in store order.
    pub fn readouts(&self, features: &[f64]) -> Result<Vec<Vec<f64>>> {
        check_features(features, self.encoding.n_features)?;
        match &self.layout {
            Layout::Sequential(h) => Ok(vec![self.head_forward(h, features)?.readout]),
            Layout::Ensemble(members) => members
                .iter()
                .map(|h| Ok(self.head_forward(h, features)?.readout))
                .collect(),
            Layout::Parallel {
                input, branches, ..
            } => {
                let hidden = input.apply(&self.params, features);
                self.branch_inputs(&hidden)
                    .into_iter()
                    .zip(branches)
                    .map(|(x, r)| self.circuit.expectations(x, &self.params[r.clone()]))
                    .collect()
            }
        }
    }

    /// `½(prediction − target)²`.
    pub fn loss(&self, features: &[f64], target: f64) -> Result<f64> {
        let r = self.forward(features)? - target;
        Ok(0.5 * r * r)
    }

    /// Final state and `⟨Z⟩` readout of one circuit evaluation.
    fn run_circuit(&self, features: &[f64], params: &[f64]) -> Result<(StateVector, Vec<f64>)> {
        let state = self.circuit.run(features, params)?;
        let readout = state.expectations_z();
        if readout.iter().any(|v| !v.is_finite()) {
            return Err(Error::numerical("non-finite expectation value"));
        }
        Ok((state, readout))
    }

    /// Circuit gradient contracted with the readout sensitivities `weights`.
    fn circuit_grad(
        &self,
        method: GradientMethod,
        features: &[f64],
        params: &[f64],
        state: &StateVector,
        weights: &[f64],
        with_features: bool,
    ) -> Result<CircuitVjp> {
        match method {
            GradientMethod::Adjoint => circuit_vjp(&self.circuit, features, params, state, weights, with_features),
            GradientMethod::ParameterShift => {
                let jac = circuit_jacobian(&self.circuit, features, params, with_features)?;
                let contract = |rows: &[Vec<f64>]| -> Vec<f64> {
                    rows.iter()
                        .map(|row| row.iter().zip(weights).map(|(a, c)| a * c).sum())
                        .collect()
                };
                Ok(CircuitVjp {
                    d_params: contract(&jac.d_params),
                    d_features: contract(&jac.d_features),
                })
            }
        }
    }

    /// Accumulate the gradient of a head whose prediction enters the loss with
    /// upstream factor `upstream = ∂L/∂prediction`.
    fn head_backward(
        &self,
        method: GradientMethod,
        head: &QuantumHead,
        features: &[f64],
        upstream: f64,
        grad: &mut [f64],
    ) -> Result<()> {
        let params = &self.params[head.quantum.clone()];
        let (state, readout) = self.run_circuit(features, params)?;
        let d_readout = head.output.backprop(&self.params, &readout, &[upstream], grad);
        let vjp = self.circuit_grad(method, features, params, &state, &d_readout, false)?;
        for (g, d) in grad[head.quantum.clone()].iter_mut().zip(&vjp.d_params) {
            *g += d;
        }
        Ok(())
    }

    /// Loss `½(prediction − target)²` and its gradient with respect to every
    /// stored parameter.
    pub fn backward(&self, features: &[f64], target: f64) -> Result<(f64, GradientVector)> {
        self.backward_with(features, target, GradientMethod::Adjoint)
    }

    /// [`backward`](Self::backward) with an explicit rule for the circuit derivatives.
    pub fn backward_with(
        &self,
        features: &[f64],
        target: f64,
        method: GradientMethod,
    ) -> Result<(f64, GradientVector)> {
        check_features(features, self.encoding.n_features)?;
        let mut grad = vec![0.0; self.params.len()];
        let prediction = match &self.layout {
            Layout::Sequential(h) => {
                // The output layer is linear, so its gradient scales with the residual.
                let out = self.forward(features)?;
                self.head_backward(method, h, features, out - target, &mut grad)?;
                out
            }
            Layout::Ensemble(members) => {
                let out = self.forward(features)?;
                let upstream = (out - target) / members.len() as f64;
                for h in members {
                    self.head_backward(method, h, features, upstream, &mut grad)?;
                }
                out
            }
            Layout::Parallel {
                input,
                branches,
                output,
            } => {
                let hidden = input.apply(&self.params, features);
                let halves = self.branch_inputs(&hidden);
                let mut states = Vec::with_capacity(2);
                let mut readout = Vec::with_capacity(output.in_dim);
                for (x, range) in halves.iter().zip(branches) {
                    let (state, r) = self.run_circuit(x, &self.params[range.clone()])?;
                    readout.extend_from_slice(&r);
                    states.push(state);
                }
                let out = output.apply(&self.params, &readout)[0];
                let d_readout = output.backprop(&self.params, &readout, &[out - target], &mut grad);
                let width = self.circuit.n_qubits();
                let mut d_hidden = Vec::with_capacity(hidden.len());
                for (b, ((x, range), state)) in halves.iter().zip(branches).zip(&states).enumerate() {
                    let dz = &d_readout[b * width..(b + 1) * width];
                    let vjp = self.circuit_grad(method, x, &self.params[range.clone()], state, dz, true)?;
                    for (g, d) in grad[range.clone()].iter_mut().zip(&vjp.d_params) {
                        *g += d;
                    }
                    d_hidden.extend(vjp.d_features);
                }
                input.backprop(&self.params, features, &d_hidden, &mut grad);
                out
            }
        };
        let r = prediction - target;
        let loss = 0.5 * r * r;
        if !loss.is_finite() {
            return Err(Error::numerical("non-finite loss"));
        }
        let grad = GradientVector(grad);
        grad.ensure_finite()?;
        Ok((loss, grad))
    }

    /// Member `i` of an ensemble as a standalone sequential model.
    pub fn member(&self, i: usize) -> Result<HybridModel> {
        let Layout::Ensemble(members) = &self.layout else {
            return Err(Error::config("only ensembles have members"));
        };
        let h = members
            .get(i)
            .ok_or_else(|| Error::config(format!("member {i} out of range")))?;
        let mut m = Self::assemble(Architecture::Sequential, self.ansatz, self.encoding, 1)?;
        let start = h.quantum.start;
        let end = h.output.bias_range().end;
        m.params.copy_from_slice(&self.params[start..end]);
        m.seed = self.seed;
        Ok(m)
    }

    /// Overwrite member `i` of an ensemble with a sequential model's parameters.
    pub fn set_member(&mut self, i: usize, member: &HybridModel) -> Result<()> {
        let Layout::Ensemble(members) = &self.layout else {
            return Err(Error::config("only ensembles have members"));
        };
        let h = members
            .get(i)
            .ok_or_else(|| Error::config(format!("member {i} out of range")))?;
        let range = h.quantum.start..h.output.bias_range().end;
        if member.params.len() != range.len() {
            return Err(Error::config("member parameter count mismatch"));
        }
        self.params[range].copy_from_slice(&member.params);
        Ok(())
    }
}

pub fn build_sequential(ansatz: AnsatzId, encoding: Encoding) -> Result<HybridModel> {
    HybridModel::build(Architecture::Sequential, ansatz, encoding)
}

pub fn build_parallel(ansatz: AnsatzId, encoding: Encoding) -> Result<HybridModel> {
    HybridModel::build(Architecture::Parallel, ansatz, encoding)
}

pub fn build_ensemble(ansatz: AnsatzId, encoding: Encoding, members: usize) -> Result<HybridModel> {
    HybridModel::assemble(
        Architecture::Ensemble,
        ansatz,
        EncodingSpec::standard(encoding),
        members,
    )
}
