//! Exact statevector simulation of QAOA circuits with mid-circuit
//! measurement and re-preparation.
//!
//! Qubit `k` is bit `k` of a basis-state index. `ZZ(theta)` is
//! `exp(-i theta Z Z / 2)` and `RX(theta)` is `exp(-i theta X / 2)`.

mod circuit;
mod qaoa;
mod state;
mod train;

pub use circuit::{Basis, Circuit, Gate, PauliState};
pub use qaoa::{build_qaoa_circuit, expectation_f, qaoa_distribution, qaoa_expectation, QaoaParams};
pub use state::{simulate, simulate_branch, Distribution, Statevector, MAX_QUBITS};
pub use train::{train_qaoa, TrainConfig, TrainResult};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("{0} qubits exceed the simulator cap of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("expected {expected} QAOA layers, got {got}")]
    LayerMismatch { expected: usize, got: usize },
}
