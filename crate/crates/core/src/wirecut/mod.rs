//! Wire cutting of a depth-2 QAOA circuit across a single separator vertex.

mod fragments;
mod overhead;
mod qpd;
mod reconstruct;
mod sampling;

pub use fragments::{build_fragments, FragmentPair, FragmentTables};
pub use overhead::{expectation_overhead, sampling_overhead, SamplingOverhead};
pub use qpd::{
    harada_decomposition, peng_decomposition, verify_qpd, MeasurePrepareChannel, Preparation, QpdCheck, QpdDecomposition,
    QPD_TOLERANCE,
};
pub use reconstruct::{cut_expectation_exact, cut_sampling_distribution, evaluate_cut, CutEvaluation};
pub use sampling::{bitstring, sample_cut, total_variation, CutSamples, CutShot};

use thiserror::Error;

use crate::problem::ProblemError;
use crate::qsim::SimError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WirecutError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("fragments need exactly 2 QAOA layers, got {0}")]
    Layers(usize),
    #[error("separator must be a single vertex, got {0}")]
    SeparatorSize(usize),
    #[error("invalid partition: {0}")]
    Partition(String),
    #[error("decomposition does not reproduce the identity (deviation {0:e})")]
    Qpd(f64),
    #[error("at least one shot is required")]
    NoShots,
    #[error("{0}")]
    Domain(String),
}
