use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::qsim::{Basis, PauliState};

/// What a channel re-prepares after measuring the cut qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preparation {
    /// The same state whatever the outcome.
    Fixed(PauliState),
    /// The eigenstate that was observed.
    Observed,
    /// The eigenstate orthogonal to the observed one.
    Flipped,
}

/// `rho -> a * sum_x c_x <e_x|rho|e_x> |psi^x><psi^x|` with `e_x` the
/// eigenstates of `basis`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurePrepareChannel {
    pub basis: Basis,
    pub preparation: Preparation,
    pub coefficient: f64,
    /// Outcome signs `c_x`, indexed by the measured bit.
    pub signs: [i8; 2],
}

impl MeasurePrepareChannel {
    pub fn prepared_state(&self, x: u8) -> PauliState {
        match self.preparation {
            Preparation::Fixed(s) => s,
            Preparation::Observed => PauliState::eigenstate(self.basis, x),
            Preparation::Flipped => PauliState::eigenstate(self.basis, 1 - x),
        }
    }

    pub fn uses_outcome(&self) -> bool {
        !matches!(self.preparation, Preparation::Fixed(_))
    }

    pub fn sign(&self, x: u8) -> f64 {
        f64::from(self.signs[usize::from(x)])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QpdDecomposition {
    pub name: String,
    pub channels: Vec<MeasurePrepareChannel>,
}

impl QpdDecomposition {
    pub fn kappa(&self) -> f64 {
        self.channels.iter().map(|c| c.coefficient.abs()).sum()
    }

    /// True if some preparation depends on the measured outcome.
    pub fn needs_communication(&self) -> bool {
        self.channels.iter().any(MeasurePrepareChannel::uses_outcome)
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }
}

/// Identity as `(Tr(rho) I + sum_P Tr(P rho) P) / 2`, no communication, kappa 4.
pub fn peng_decomposition() -> QpdDecomposition {
    let mut channels = Vec::with_capacity(8);
    for (basis, plus, minus) in [
        (Basis::Z, PauliState::Zero, PauliState::One),
        (Basis::X, PauliState::Plus, PauliState::Minus),
        (Basis::Y, PauliState::PlusI, PauliState::MinusI),
    ] {
        for (state, a) in [(plus, 0.5), (minus, -0.5)] {
            channels.push(MeasurePrepareChannel {
                basis,
                preparation: Preparation::Fixed(state),
                coefficient: a,
                signs: [1, -1],
            });
        }
    }
    for state in [PauliState::Zero, PauliState::One] {
        channels.push(MeasurePrepareChannel {
            basis: Basis::Z,
            preparation: Preparation::Fixed(state),
            coefficient: 0.5,
            signs: [1, 1],
        });
    }
    QpdDecomposition {
        name: "peng".into(),
        channels,
    }
}

/// Identity from dephasing channels with one-way communication, kappa 3.
///
/// `D_Z + (D_X + D_Y)/2 - (Z D_X Z + Z D_Y Z)/2` where `D_P` measures `P`
/// and re-prepares the observed eigenstate.
pub fn harada_decomposition() -> QpdDecomposition {
    let ch = |basis, preparation, coefficient| MeasurePrepareChannel {
        basis,
        preparation,
        coefficient,
        signs: [1, 1],
    };
    QpdDecomposition {
        name: "harada".into(),
        channels: vec![
            ch(Basis::Z, Preparation::Observed, 1.0),
            ch(Basis::X, Preparation::Observed, 0.5),
            ch(Basis::Y, Preparation::Observed, 0.5),
            ch(Basis::X, Preparation::Flipped, -0.5),
            ch(Basis::Y, Preparation::Flipped, -0.5),
        ],
    }
}

type Density = [[Complex64; 2]; 2];

fn projector(s: PauliState) -> Density {
    let [a, b] = s.amplitudes();
    [[a * a.conj(), a * b.conj()], [b * a.conj(), b * b.conj()]]
}

fn expect(rho: &Density, s: PauliState) -> f64 {
    let [a, b] = s.amplitudes();
    let v = [a, b];
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            acc += v[i].conj() * rho[i][j] * v[j];
        }
    }
    acc.re
}

fn apply(d: &QpdDecomposition, rho: &Density) -> Density {
    let zero = Complex64::new(0.0, 0.0);
    let mut out = [[zero; 2]; 2];
    for ch in &d.channels {
        for x in [0u8, 1] {
            let p = expect(rho, PauliState::eigenstate(ch.basis, x));
            let w = ch.coefficient * ch.sign(x) * p;
            let prep = projector(ch.prepared_state(x));
            for i in 0..2 {
                for j in 0..2 {
                    out[i][j] += prep[i][j] * w;
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QpdCheck {
    pub passed: bool,
    pub max_deviation: f64,
}

pub const QPD_TOLERANCE: f64 = 1e-12;

/// Applies the decomposition to `|0>, |1>, |+>, |+i>`, which span all
/// single-qubit operators, and compares with the input.
pub fn verify_qpd(d: &QpdDecomposition) -> QpdCheck {
    let mut max_deviation: f64 = 0.0;
    for s in [PauliState::Zero, PauliState::One, PauliState::Plus, PauliState::PlusI] {
        let rho = projector(s);
        let out = apply(d, &rho);
        for i in 0..2 {
            for j in 0..2 {
                max_deviation = max_deviation.max((out[i][j] - rho[i][j]).norm());
            }
        }
    }
    QpdCheck {
        passed: max_deviation < QPD_TOLERANCE,
        max_deviation,
    }
}
