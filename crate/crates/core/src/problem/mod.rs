//! Problem representations and the exact reductions between them.
//!
//! TSP -> QUBO follows the standard one-hot time-step model with the start
//! city pinned to time 0, giving `(N-1)^2` variables. QUBO -> MaxCut adds a
//! root vertex `0` and maps QUBO variable `i` to vertex `i + 1`.

mod maxcut;
mod qubo;
mod tsp;

pub use maxcut::{cut_to_assignment, qubo_to_maxcut, Contraction, CutSolution, Edge, MaxCutInstance};
pub use qubo::{decode_tour, tsp_to_qubo, DecodedTour, OneHotViolation, QuboProblem, TspEncoding, TspVariable};
pub use tsp::{generate_euclidean_tsp, tsp_brute_force, Tour, TspInstance, MAX_BRUTE_FORCE_CITIES};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("penalty ratio A/B = {ratio} must exceed N * max d = {required}")]
    PenaltyTooSmall { ratio: f64, required: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("instance has no root vertex; it was not derived from a QUBO")]
    NotQuboDerived,
    #[error("{what} of size {size} exceeds the limit {limit}")]
    TooLarge { what: &'static str, size: usize, limit: usize },
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(usize),
}

/// Default penalties: `B = 1`, `A = N * max d + 1`.
pub fn default_penalties(tsp: &TspInstance) -> (f64, f64) {
    let a = tsp.n_cities() as f64 * tsp.max_distance() + 1.0;
    (a, 1.0)
}
