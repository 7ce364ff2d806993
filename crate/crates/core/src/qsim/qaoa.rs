use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::circuit::{Circuit, Gate, PauliState};
use super::state::{Distribution, MAX_QUBITS};
use super::SimError;
use crate::problem::MaxCutInstance;

/// Interleaved angles `(gamma_1, beta_1, ..., gamma_p, beta_p)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    angles: Vec<f64>,
}

impl QaoaParams {
    pub fn new(angles: Vec<f64>) -> Result<Self, SimError> {
        if angles.is_empty() || !angles.len().is_multiple_of(2) {
            return Err(SimError::InvalidCircuit(format!("{} QAOA angles, expected 2p", angles.len())));
        }
        Ok(QaoaParams { angles })
    }

    pub fn zeros(layers: usize) -> Self {
        QaoaParams {
            angles: vec![0.0; 2 * layers.max(1)],
        }
    }

    pub fn layers(&self) -> usize {
        self.angles.len() / 2
    }

    pub fn gamma(&self, layer: usize) -> f64 {
        self.angles[2 * layer]
    }

    pub fn beta(&self, layer: usize) -> f64 {
        self.angles[2 * layer + 1]
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }
}

/// Gate-level QAOA circuit; `edge_order` lists edge indices of `g`.
pub fn build_qaoa_circuit(g: &MaxCutInstance, params: &QaoaParams, edge_order: &[usize]) -> Result<Circuit, SimError> {
    let n = g.n_vertices();
    let mut seen = vec![false; g.n_edges()];
    for &e in edge_order {
        if e >= g.n_edges() || std::mem::replace(&mut seen[e], true) {
            return Err(SimError::InvalidCircuit(format!("edge order is not a permutation (index {e})")));
        }
    }
    if edge_order.len() != g.n_edges() {
        return Err(SimError::DimensionMismatch {
            expected: g.n_edges(),
            got: edge_order.len(),
        });
    }
    let mut c = Circuit::new(n, n, PauliState::Plus);
    for l in 0..params.layers() {
        for &k in edge_order {
            let e = g.edges()[k];
            c.push(Gate::Zz {
                a: e.u,
                b: e.v,
                theta: params.gamma(l) * e.w,
            });
        }
        for q in 0..n {
            c.push(Gate::Rx {
                q,
                theta: 2.0 * params.beta(l),
            });
        }
    }
    for q in 0..n {
        c.push(Gate::Measure { q, clbit: q });
    }
    Ok(c)
}

/// Output distribution of the QAOA circuit, computed with the cost layer
/// applied as a diagonal phase `exp(i gamma f(s))` (equal to the gate
/// product up to a global phase).
pub fn qaoa_distribution(g: &MaxCutInstance, params: &QaoaParams) -> Result<Distribution, SimError> {
    let n = g.n_vertices();
    if n > MAX_QUBITS {
        return Err(SimError::TooManyQubits(n));
    }
    let f = g.cut_weight_table().map_err(|_| SimError::TooManyQubits(n))?;
    let dim = 1usize << n;
    let mut amps = vec![Complex64::new((dim as f64).sqrt().recip(), 0.0); dim];
    for l in 0..params.layers() {
        let gamma = params.gamma(l);
        for (a, &fs) in amps.iter_mut().zip(&f) {
            *a *= Complex64::from_polar(1.0, gamma * fs);
        }
        let c = params.beta(l).cos();
        let s = Complex64::new(0.0, -params.beta(l).sin());
        for q in 0..n {
            let bit = 1 << q;
            for i in 0..dim {
                if i & bit == 0 {
                    let (a0, a1) = (amps[i], amps[i | bit]);
                    amps[i] = a0 * c + a1 * s;
                    amps[i | bit] = a0 * s + a1 * c;
                }
            }
        }
    }
    Ok(Distribution {
        n_bits: n,
        probs: amps.iter().map(|a| a.norm_sqr()).collect(),
    })
}

/// `sum_s p(s) f(s)`.
pub fn expectation_f(g: &MaxCutInstance, dist: &Distribution) -> Result<f64, SimError> {
    let n = g.n_vertices();
    if dist.n_bits != n || dist.probs.len() != 1 << n {
        return Err(SimError::DimensionMismatch {
            expected: n,
            got: dist.n_bits,
        });
    }
    Ok(dist
        .probs
        .iter()
        .enumerate()
        .filter(|(_, &p)| p != 0.0)
        .map(|(s, &p)| p * g.cut_weight_bits(s as u64))
        .sum())
}

pub fn qaoa_expectation(g: &MaxCutInstance, params: &QaoaParams) -> Result<f64, SimError> {
    expectation_f(g, &qaoa_distribution(g, params)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Edge;
    use crate::qsim::simulate;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type Matrix = Vec<Vec<Complex64>>;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn kron(a: &Matrix, b: &Matrix) -> Matrix {
        let (ra, rb) = (a.len(), b.len());
        let mut out = vec![vec![c(0.0, 0.0); ra * rb]; ra * rb];
        for i in 0..ra {
            for j in 0..ra {
                for k in 0..rb {
                    for l in 0..rb {
                        out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                    }
                }
            }
        }
        out
    }

    fn eye(d: usize) -> Matrix {
        (0..d).map(|i| (0..d).map(|j| c(if i == j { 1.0 } else { 0.0 }, 0.0)).collect()).collect()
    }

    /// Full operator for single-qubit matrices `ops[q]`; qubit 0 is the
    /// least significant factor, so it sits rightmost in the Kronecker product.
    fn embed(n: usize, ops: &[(usize, Matrix)]) -> Matrix {
        let mut m = vec![vec![c(1.0, 0.0)]];
        for q in (0..n).rev() {
            let f = ops.iter().find(|(k, _)| *k == q).map_or(eye(2), |(_, o)| o.clone());
            m = kron(&m, &f);
        }
        m
    }

    fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
        let d = a.len();
        (0..d)
            .map(|i| (0..d).map(|j| (0..d).map(|k| a[i][k] * b[k][j]).sum()).collect())
            .collect()
    }

    fn expm_i_theta_over_2(theta: f64, paulis: &Matrix) -> Matrix {
        // exp(-i theta P / 2) = cos(theta/2) I - i sin(theta/2) P for P^2 = I
        let d = paulis.len();
        let id = eye(d);
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| id[i][j] * (theta / 2.0).cos() - c(0.0, (theta / 2.0).sin()) * paulis[i][j])
                    .collect()
            })
            .collect()
    }

    fn dense_qaoa(g: &MaxCutInstance, params: &QaoaParams) -> Vec<f64> {
        let n = g.n_vertices();
        let x = vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]];
        let z = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]];
        let dim = 1 << n;
        let mut u = eye(dim);
        for l in 0..params.layers() {
            for e in g.edges() {
                let zz = embed(n, &[(e.u, z.clone()), (e.v, z.clone())]);
                u = matmul(&expm_i_theta_over_2(params.gamma(l) * e.w, &zz), &u);
            }
            for q in 0..n {
                let xq = embed(n, &[(q, x.clone())]);
                u = matmul(&expm_i_theta_over_2(2.0 * params.beta(l), &xq), &u);
            }
        }
        let amp0 = (dim as f64).sqrt().recip();
        (0..dim)
            .map(|i| (0..dim).map(|j| u[i][j] * amp0).sum::<Complex64>().norm_sqr())
            .collect()
    }

    fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> MaxCutInstance {
        let mut edges = vec![];
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(0.6) {
                    edges.push(Edge { u, v, w: rng.gen_range(-1.5..2.5) });
                }
            }
        }
        MaxCutInstance::new(n, edges).unwrap()
    }

    fn random_params(rng: &mut ChaCha8Rng, p: usize) -> QaoaParams {
        QaoaParams::new((0..2 * p).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap()
    }

    fn identity_order(g: &MaxCutInstance) -> Vec<usize> {
        (0..g.n_edges()).collect()
    }

    #[test]
    fn gate_simulation_matches_dense_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(81);
        for n in 2..=5 {
            let g = random_graph(&mut rng, n);
            let params = random_params(&mut rng, 2);
            let dense = dense_qaoa(&g, &params);
            let gates = simulate(&build_qaoa_circuit(&g, &params, &identity_order(&g)).unwrap()).unwrap();
            let fast = qaoa_distribution(&g, &params).unwrap();
            for s in 0..1 << n {
                assert!((gates.probs[s] - dense[s]).abs() < 1e-10);
                assert!((fast.probs[s] - dense[s]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn zero_angles_give_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(82);
        let g = random_graph(&mut rng, 4);
        let d = simulate(&build_qaoa_circuit(&g, &QaoaParams::zeros(2), &identity_order(&g)).unwrap()).unwrap();
        for p in &d.probs {
            assert!((p - 1.0 / 16.0).abs() < 1e-15);
        }
        let e = qaoa_expectation(&g, &QaoaParams::zeros(2)).unwrap();
        assert!((e - g.total_weight() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn single_edge_closed_form() {
        // the dense oracle fixes the sign: with the cost layer acting as
        // exp(+i gamma f) the cut expectation is w/2 (1 - sin(4 beta) sin(gamma w))
        for &w in &[1.0, 0.7, -1.3] {
            let g = MaxCutInstance::new(2, vec![Edge { u: 0, v: 1, w }]).unwrap();
            for k in 0..25 {
                let gamma = -1.5 + 0.13 * k as f64;
                let beta = 0.9 - 0.11 * k as f64;
                let params = QaoaParams::new(vec![gamma, beta]).unwrap();
                let dense = dense_qaoa(&g, &params);
                let oracle = w * (dense[1] + dense[2]);
                let closed = w / 2.0 * (1.0 - (4.0 * beta).sin() * (gamma * w).sin());
                assert!((oracle - closed).abs() < 1e-12, "{oracle} vs {closed}");
                assert!((qaoa_expectation(&g, &params).unwrap() - closed).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn edge_order_does_not_matter() {
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        let g = random_graph(&mut rng, 6);
        let params = random_params(&mut rng, 2);
        let base = simulate(&build_qaoa_circuit(&g, &params, &identity_order(&g)).unwrap()).unwrap();
        for _ in 0..5 {
            let mut order = identity_order(&g);
            order.shuffle(&mut rng);
            let d = simulate(&build_qaoa_circuit(&g, &params, &order).unwrap()).unwrap();
            for (a, b) in base.probs.iter().zip(&d.probs) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn distributions_are_normalised() {
        let mut rng = ChaCha8Rng::seed_from_u64(84);
        for n in 3..10 {
            let g = random_graph(&mut rng, n);
            let d = qaoa_distribution(&g, &random_params(&mut rng, 2)).unwrap();
            assert!((d.total() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn expectation_of_point_mass_is_cut_weight() {
        let mut rng = ChaCha8Rng::seed_from_u64(85);
        let g = random_graph(&mut rng, 5);
        let mut d = Distribution { n_bits: 5, probs: vec![0.0; 32] };
        d.probs[0b10110] = 1.0;
        assert_eq!(expectation_f(&g, &d).unwrap(), g.cut_weight_bits(0b10110));
        let uniform = Distribution::uniform(5);
        assert!((expectation_f(&g, &uniform).unwrap() - g.total_weight() / 2.0).abs() < 1e-12);
        assert!(expectation_f(&g, &Distribution::uniform(4)).is_err());
    }

    #[test]
    fn bad_inputs_are_rejected() {
        let g = MaxCutInstance::new(3, vec![Edge { u: 0, v: 1, w: 1.0 }, Edge { u: 1, v: 2, w: 1.0 }]).unwrap();
        let p = QaoaParams::zeros(1);
        assert!(build_qaoa_circuit(&g, &p, &[0]).is_err());
        assert!(build_qaoa_circuit(&g, &p, &[0, 0]).is_err());
        assert!(build_qaoa_circuit(&g, &p, &[0, 2]).is_err());
        assert!(QaoaParams::new(vec![0.1]).is_err());
    }
}
