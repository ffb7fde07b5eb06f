//! Exact complex statevector simulation.
//!
//! Conventions used throughout the crate:
//!
//! * amplitudes are indexed by basis state with wire 0 as the most significant bit;
//! * `RX(θ) = exp(-iθX/2)` and likewise for `RY`, `RZ`;
//! * `Rot3(φ, θ, ω) = RZ(ω)·RY(θ)·RZ(φ)`;
//! * global phase is never tracked, comparisons go through [`canonical_phase`].

mod gate;
mod op;
pub mod oracle;
mod state;

pub use gate::GateKind;
pub use op::{Binding, GateOp};
pub use oracle::{dense_unitary_oracle, oracle_state, DenseMatrix};
pub use state::{apply_gate, canonical_phase, max_phase_aligned_deviation, StateVector, MAX_QUBITS};
