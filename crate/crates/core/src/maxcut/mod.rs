//! MaxCut models: the cycle relaxation with odd-cycle separation, the
//! balanced vertex separator integer program, and exact MaxCut.

mod exact;
mod relaxation;
mod separation;
mod separator;

pub use exact::{maxcut_brute_force, maxcut_exact, MAX_BRUTE_FORCE_VERTICES, MAX_EXACT_VERTICES};
pub use relaxation::{solve_cycle_relaxation, FractionalCut};
pub use separation::{separate_odd_cycle, separate_odd_cycles, OddCycleCut};
pub use separator::{
    balanced_vertex_separator, balanced_vertex_separator_with, greedy_separator, separator_model, SeparatorOptions,
    SeparatorResult,
};

use thiserror::Error;

use crate::linprog::{LpError, MilpError};
use crate::problem::ProblemError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MaxCutError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Milp(#[from] MilpError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("graph with {size} vertices exceeds the limit of {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("relaxation is {0}")]
    RelaxationStatus(&'static str),
    #[error("no separator satisfies the balance bound {beta}")]
    NoSeparator { beta: usize },
    #[error("separator needs at least 3 vertices, got {0}")]
    TooSmall(usize),
    #[error("branch-and-bound stopped after {0} nodes")]
    NodeLimit(usize),
}
