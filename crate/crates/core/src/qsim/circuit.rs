use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SimError;

/// Measurement basis; the rotation applied before a Z measurement is `U^dagger`
/// with `U_Z = I`, `U_X = H`, `U_Y = S H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
    Y,
}

/// The six single-qubit Pauli eigenstates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliState {
    Zero,
    One,
    Plus,
    Minus,
    PlusI,
    MinusI,
}

impl PauliState {
    /// Eigenstate of `basis` with outcome bit `x` (0 = +1 eigenvalue).
    pub fn eigenstate(basis: Basis, x: u8) -> Self {
        match (basis, x) {
            (Basis::Z, 0) => PauliState::Zero,
            (Basis::Z, _) => PauliState::One,
            (Basis::X, 0) => PauliState::Plus,
            (Basis::X, _) => PauliState::Minus,
            (Basis::Y, 0) => PauliState::PlusI,
            (Basis::Y, _) => PauliState::MinusI,
        }
    }

    pub fn amplitudes(self) -> [Complex64; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let c = |re: f64, im: f64| Complex64::new(re, im);
        match self {
            PauliState::Zero => [c(1.0, 0.0), c(0.0, 0.0)],
            PauliState::One => [c(0.0, 0.0), c(1.0, 0.0)],
            PauliState::Plus => [c(h, 0.0), c(h, 0.0)],
            PauliState::Minus => [c(h, 0.0), c(-h, 0.0)],
            PauliState::PlusI => [c(h, 0.0), c(0.0, h)],
            PauliState::MinusI => [c(h, 0.0), c(0.0, -h)],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    Zz { a: usize, b: usize, theta: f64 },
    Rx { q: usize, theta: f64 },
    BasisChange { q: usize, basis: Basis },
    /// Computational-basis measurement of `q` into classical bit `clbit`.
    Measure { q: usize, clbit: usize },
    /// Replaces a just-measured qubit by a fresh pure state.
    Prepare { q: usize, state: PauliState },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub n_clbits: usize,
    /// Initial state of every qubit.
    pub init: Vec<PauliState>,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize, n_clbits: usize, init: PauliState) -> Self {
        Circuit {
            n_qubits,
            n_clbits,
            init: vec![init; n_qubits],
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, g: Gate) -> &mut Self {
        self.gates.push(g);
        self
    }

    /// Targets in range, every classical bit written exactly once, and
    /// `Prepare` only directly after a measurement of the same qubit.
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidCircuit(m));
        if self.init.len() != self.n_qubits {
            return bad(format!("{} initial states for {} qubits", self.init.len(), self.n_qubits));
        }
        let mut written = vec![false; self.n_clbits];
        let mut last_measured = vec![false; self.n_qubits];
        for (k, g) in self.gates.iter().enumerate() {
            let qs: Vec<usize> = match *g {
                Gate::Zz { a, b, .. } => vec![a, b],
                Gate::Rx { q, .. } | Gate::BasisChange { q, .. } | Gate::Measure { q, .. } | Gate::Prepare { q, .. } => {
                    vec![q]
                }
            };
            if let Some(&q) = qs.iter().find(|&&q| q >= self.n_qubits) {
                return bad(format!("gate {k} targets qubit {q} of {}", self.n_qubits));
            }
            if let Gate::Zz { a, b, .. } = *g {
                if a == b {
                    return bad(format!("gate {k} couples qubit {a} with itself"));
                }
            }
            match *g {
                Gate::Measure { q, clbit } => {
                    if clbit >= self.n_clbits {
                        return bad(format!("gate {k} writes clbit {clbit} of {}", self.n_clbits));
                    }
                    if std::mem::replace(&mut written[clbit], true) {
                        return bad(format!("clbit {clbit} written twice"));
                    }
                    last_measured[q] = true;
                }
                Gate::Prepare { q, .. } => {
                    if !last_measured[q] {
                        return bad(format!("gate {k} prepares qubit {q} without a preceding measurement"));
                    }
                    last_measured[q] = false;
                }
                _ => {
                    for q in qs {
                        last_measured[q] = false;
                    }
                }
            }
        }
        Ok(())
    }
}
