//! Exact statevector simulation and training of small hybrid quantum-classical
//! regression models.
//!
//! The crate is organized bottom-up:
//!
//! * [`sim`]: complex statevector, gate application, `⟨Z⟩` readout and a dense
//!   matrix oracle;
//! * [`circuit`]: the circuit IR, angle and amplitude encodings and the five
//!   built-in ansatze;
//! * [`grad`]: parameter-shift Jacobians, an adjoint vector-Jacobian sweep
//!   and finite-difference checkers;
//! * [`model`]: sequential, parallel and ensemble hybrid models;
//! * [`data`] and [`train`]: sample ingestion, normalization, splits and
//!   full-batch gradient descent.
//!
//! ```
//! use qbind::circuit::{build_ansatz, complexity_metrics, AnsatzId, Encoding, EncodingSpec};
//!
//! let c = build_ansatz(AnsatzId::A1, EncodingSpec::standard(Encoding::Amplitude), 2)?;
//! let m = complexity_metrics(&c);
//! assert_eq!((m.total_gates, m.two_qubit_gates, m.trainable_params), (17, 8, 24));
//! # Ok::<(), qbind::Error>(())
//! ```

pub mod circuit;
pub mod data;
pub mod error;
pub mod grad;
pub mod model;
pub mod sim;
pub mod train;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/simulator.md")]
    mod simulator {}
    #[doc = include_str!("../../../book/src/circuits.md")]
    mod circuits {}
    #[doc = include_str!("../../../book/src/gradients.md")]
    mod gradients {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/training.md")]
    mod training {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
