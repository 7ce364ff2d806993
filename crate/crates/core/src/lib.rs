//! Quantum-classical decomposition for small routing problems.
//!
//! A TSP instance is encoded as a QUBO, mapped to weighted MaxCut, shrunk by
//! LP-guided edge contractions until a single-vertex balanced separator
//! remains, and the resulting depth-`p` QAOA circuit is evaluated both uncut
//! and split into two fragments with a Harada (one-way communication) wire cut
//! followed by a Peng (no communication) wire cut.
//!
//! Bit-string convention, used everywhere: bit `k` of an index `s` is the
//! outcome of qubit `k`, which is vertex `k` of the graph the circuit encodes.

pub mod jsonfmt;
pub mod linprog;
pub mod maxcut;
pub mod pipeline;
pub mod problem;
pub mod qsim;
pub mod rng;
pub mod shrink;
pub mod wirecut;

pub use problem::{CutSolution, MaxCutInstance, QuboProblem, Tour, TspInstance};
