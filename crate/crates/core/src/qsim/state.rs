use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::circuit::{Basis, Circuit, Gate, PauliState};
use super::SimError;

pub const MAX_QUBITS: usize = 20;

/// Amplitudes over `2^n` basis states; bit `k` of the index is qubit `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    pub fn product(states: &[PauliState]) -> Result<Self, SimError> {
        let n = states.len();
        if n > MAX_QUBITS {
            return Err(SimError::TooManyQubits(n));
        }
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for (k, s) in states.iter().enumerate() {
            let [a0, a1] = s.amplitudes();
            let mut next = vec![Complex64::new(0.0, 0.0); amps.len() * 2];
            for (i, &a) in amps.iter().enumerate() {
                next[i] = a * a0;
                next[i | 1 << k] = a * a1;
            }
            amps = next;
        }
        Ok(Statevector { n_qubits: n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn apply_zz(&mut self, a: usize, b: usize, theta: f64) {
        let same = Complex64::from_polar(1.0, -theta / 2.0);
        let diff = same.conj();
        for (i, amp) in self.amps.iter_mut().enumerate() {
            *amp *= if (i >> a ^ i >> b) & 1 == 0 { same } else { diff };
        }
    }

    fn apply_1q(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let bit = 1 << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub fn apply_rx(&mut self, q: usize, theta: f64) {
        let c = Complex64::new((theta / 2.0).cos(), 0.0);
        let s = Complex64::new(0.0, -(theta / 2.0).sin());
        self.apply_1q(q, [[c, s], [s, c]]);
    }

    /// Applies `U^dagger` so that a Z measurement afterwards measures `basis`.
    pub fn apply_basis_change(&mut self, q: usize, basis: Basis) {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let hadamard = [[h, h], [h, -h]];
        match basis {
            Basis::Z => {}
            Basis::X => self.apply_1q(q, hadamard),
            Basis::Y => {
                self.apply_1q(q, [[one, zero], [zero, Complex64::new(0.0, -1.0)]]);
                self.apply_1q(q, hadamard);
            }
        }
    }

    /// Keeps only the component with qubit `q` equal to `bit` (unnormalized)
    /// and returns its squared norm.
    pub fn project(&mut self, q: usize, bit: u8) -> f64 {
        let mut p = 0.0;
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if (i >> q & 1) as u8 == bit {
                p += amp.norm_sqr();
            } else {
                *amp = Complex64::new(0.0, 0.0);
            }
        }
        p
    }

    /// Replaces qubit `q`, known to be in basis state `from`, by `state`.
    pub fn reprepare(&mut self, q: usize, from: u8, state: PauliState) {
        let [p0, p1] = state.amplitudes();
        let bit = 1 << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let a = if from == 0 { self.amps[i] } else { self.amps[i | bit] };
                self.amps[i] = a * p0;
                self.amps[i | bit] = a * p1;
            }
        }
    }
}

/// Probabilities over classical bit strings; bit `k` of the index is classical bit `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub n_bits: usize,
    pub probs: Vec<f64>,
}

impl Distribution {
    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn uniform(n_bits: usize) -> Self {
        let len = 1usize << n_bits;
        Distribution {
            n_bits,
            probs: vec![1.0 / len as f64; len],
        }
    }
}

struct Branch {
    state: Statevector,
    clbits: usize,
    last_outcome: Vec<u8>,
}

/// Exact clbit distribution of `c`, branching on mid-circuit measurements.
///
/// A trailing run of measurements is read from the final amplitudes.
pub fn simulate(c: &Circuit) -> Result<Distribution, SimError> {
    c.validate()?;
    if c.n_qubits > MAX_QUBITS {
        return Err(SimError::TooManyQubits(c.n_qubits));
    }
    if c.n_clbits > 30 {
        return Err(SimError::InvalidCircuit(format!("{} classical bits", c.n_clbits)));
    }
    let suffix_start = c
        .gates
        .iter()
        .rposition(|g| !matches!(g, Gate::Measure { .. }))
        .map_or(0, |k| k + 1);
    let mut branches = vec![Branch {
        state: Statevector::product(&c.init)?,
        clbits: 0,
        last_outcome: vec![0; c.n_qubits],
    }];
    for g in &c.gates[..suffix_start] {
        match *g {
            Gate::Zz { a, b, theta } => branches.iter_mut().for_each(|br| br.state.apply_zz(a, b, theta)),
            Gate::Rx { q, theta } => branches.iter_mut().for_each(|br| br.state.apply_rx(q, theta)),
            Gate::BasisChange { q, basis } => branches.iter_mut().for_each(|br| br.state.apply_basis_change(q, basis)),
            Gate::Prepare { q, state } => branches
                .iter_mut()
                .for_each(|br| br.state.reprepare(q, br.last_outcome[q], state)),
            Gate::Measure { q, clbit } => {
                let mut next = Vec::with_capacity(branches.len() * 2);
                for br in branches {
                    for bit in [0u8, 1] {
                        let mut s = br.state.clone();
                        if s.project(q, bit) == 0.0 {
                            continue;
                        }
                        let mut last = br.last_outcome.clone();
                        last[q] = bit;
                        next.push(Branch {
                            state: s,
                            clbits: br.clbits | usize::from(bit) << clbit,
                            last_outcome: last,
                        });
                    }
                }
                branches = next;
            }
        }
    }
    let reads: Vec<(usize, usize)> = c.gates[suffix_start..]
        .iter()
        .map(|g| match *g {
            Gate::Measure { q, clbit } => (q, clbit),
            _ => unreachable!("suffix holds only measurements"),
        })
        .collect();
    let mut probs = vec![0.0; 1 << c.n_clbits];
    for br in &branches {
        for (i, amp) in br.state.amps.iter().enumerate() {
            let p = amp.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let mut key = br.clbits;
            for &(q, clbit) in &reads {
                key |= (i >> q & 1) << clbit;
            }
            probs[key] += p;
        }
    }
    Ok(Distribution {
        n_bits: c.n_clbits,
        probs,
    })
}

/// Probability of the forced classical outcomes and the conditional
/// distribution of the remaining classical bits (in increasing order).
pub fn simulate_branch(c: &Circuit, forced: &[(usize, u8)]) -> Result<(f64, Distribution), SimError> {
    let joint = simulate(c)?;
    for &(clbit, _) in forced {
        if clbit >= c.n_clbits {
            return Err(SimError::InvalidCircuit(format!("forced clbit {clbit} of {}", c.n_clbits)));
        }
    }
    let free: Vec<usize> = (0..c.n_clbits).filter(|k| !forced.iter().any(|f| f.0 == *k)).collect();
    let mut cond = vec![0.0; 1 << free.len()];
    let mut total = 0.0;
    for (key, &p) in joint.probs.iter().enumerate() {
        if forced.iter().any(|&(k, b)| (key >> k & 1) as u8 != b) {
            continue;
        }
        total += p;
        let idx = free.iter().enumerate().fold(0, |acc, (j, &k)| acc | (key >> k & 1) << j);
        cond[idx] += p;
    }
    if total > 0.0 {
        cond.iter_mut().for_each(|p| *p /= total);
    }
    Ok((
        total,
        Distribution {
            n_bits: free.len(),
            probs: cond,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_circuit_from_zero() {
        let mut c = Circuit::new(2, 2, PauliState::Zero);
        c.push(Gate::Measure { q: 0, clbit: 0 }).push(Gate::Measure { q: 1, clbit: 1 });
        let d = simulate(&c).unwrap();
        assert_eq!(d.probs, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn plus_states_measure_uniformly() {
        let mut c = Circuit::new(3, 3, PauliState::Plus);
        for q in 0..3 {
            c.push(Gate::Measure { q, clbit: q });
        }
        let d = simulate(&c).unwrap();
        for p in d.probs {
            assert!((p - 0.125).abs() < 1e-15);
        }
    }

    #[test]
    fn forced_measurement_of_plus() {
        // measure, then keep using the qubit so the measurement is mid-circuit
        let mut c = Circuit::new(1, 2, PauliState::Plus);
        c.push(Gate::Measure { q: 0, clbit: 0 })
            .push(Gate::Rx { q: 0, theta: 0.0 })
            .push(Gate::Measure { q: 0, clbit: 1 });
        let (p, rest) = simulate_branch(&c, &[(0, 0)]).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert!((rest.probs[0] - 1.0).abs() < 1e-15);
        let (p1, _) = simulate_branch(&c, &[(0, 1)]).unwrap();
        assert!((p + p1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn basis_changes_identify_eigenstates() {
        for basis in [Basis::Z, Basis::X, Basis::Y] {
            for x in [0u8, 1] {
                let mut c = Circuit::new(1, 1, PauliState::eigenstate(basis, x));
                c.push(Gate::BasisChange { q: 0, basis }).push(Gate::Measure { q: 0, clbit: 0 });
                let d = simulate(&c).unwrap();
                assert!((d.probs[usize::from(x)] - 1.0).abs() < 1e-12, "{basis:?} {x}");
            }
        }
    }

    #[test]
    fn reprepare_after_measure() {
        let mut c = Circuit::new(1, 2, PauliState::Plus);
        c.push(Gate::Measure { q: 0, clbit: 0 })
            .push(Gate::Prepare { q: 0, state: PauliState::One })
            .push(Gate::Measure { q: 0, clbit: 1 });
        let d = simulate(&c).unwrap();
        assert!((d.probs[0b10] - 0.5).abs() < 1e-15);
        assert!((d.probs[0b11] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn invalid_circuits_are_rejected() {
        let mut c = Circuit::new(1, 1, PauliState::Zero);
        c.push(Gate::Prepare { q: 0, state: PauliState::One });
        assert!(simulate(&c).is_err());
        let mut c = Circuit::new(1, 1, PauliState::Zero);
        c.push(Gate::Measure { q: 0, clbit: 0 }).push(Gate::Measure { q: 0, clbit: 0 });
        assert!(simulate(&c).is_err());
        let mut c = Circuit::new(2, 0, PauliState::Zero);
        c.push(Gate::Zz { a: 0, b: 2, theta: 1.0 });
        assert!(simulate(&c).is_err());
        let c = Circuit::new(MAX_QUBITS + 1, 0, PauliState::Zero);
        assert!(matches!(simulate(&c), Err(SimError::TooManyQubits(_))));
    }
}
