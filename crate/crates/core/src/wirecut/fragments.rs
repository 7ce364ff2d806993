use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::qpd::{harada_decomposition, peng_decomposition, verify_qpd, QpdDecomposition};
use super::WirecutError;
use crate::problem::MaxCutInstance;
use crate::qsim::{simulate, Circuit, Distribution, Gate, PauliState, QaoaParams};

/// Two fragments of a depth-2 QAOA circuit whose graph splits as `A | c | B`.
///
/// The wire of `c` is cut twice: after the first cost layer's `A`-`c` gates
/// (Harada channels, so fragment B's preparation depends on fragment A's
/// outcome) and after the second cost layer's `c`-`B` gates (Peng channels).
///
/// Fragment A: qubits `0..|A|` are `side_a`, qubit `|A|` is `c`; classical
/// bits `0..|A|` hold `a`, bit `|A|` the final `c` and bit `|A|+1` the cut
/// outcome `x_h`. Fragment B: qubits `0..|B|` are `side_b`, qubit `|B|` is
/// `c`; bits `0..|B|` hold `b` and bit `|B|` the cut outcome `x_p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FragmentPair {
    pub graph: MaxCutInstance,
    pub params: QaoaParams,
    pub separator: usize,
    pub side_a: Vec<usize>,
    pub side_b: Vec<usize>,
    pub harada: QpdDecomposition,
    pub peng: QpdDecomposition,
    /// Edges on `A ∪ {c}` as (qubit, qubit, weight) in fragment-A numbering.
    edges_a: Vec<(usize, usize, f64)>,
    edges_b: Vec<(usize, usize, f64)>,
}

pub fn build_fragments(
    g: &MaxCutInstance,
    separator: usize,
    side_a: &[usize],
    side_b: &[usize],
    params: &QaoaParams,
) -> Result<FragmentPair, WirecutError> {
    if params.layers() != 2 {
        return Err(WirecutError::Layers(params.layers()));
    }
    let n = g.n_vertices();
    let mut role = vec![None; n];
    for (k, &v) in side_a.iter().enumerate() {
        if v >= n || role[v].is_some() {
            return Err(WirecutError::Partition(format!("vertex {v} repeated or out of range")));
        }
        role[v] = Some((0u8, k));
    }
    for (k, &v) in side_b.iter().enumerate() {
        if v >= n || role[v].is_some() {
            return Err(WirecutError::Partition(format!("vertex {v} repeated or out of range")));
        }
        role[v] = Some((1u8, k));
    }
    if separator >= n || role[separator].is_some() {
        return Err(WirecutError::Partition(format!("separator {separator} invalid")));
    }
    role[separator] = Some((2, 0));
    if let Some(v) = role.iter().position(Option::is_none) {
        return Err(WirecutError::Partition(format!("vertex {v} not assigned")));
    }
    let (na, nb) = (side_a.len(), side_b.len());
    let qubit = |v: usize, frag: u8| -> usize {
        match role[v].expect("checked above") {
            (2, _) => {
                if frag == 0 {
                    na
                } else {
                    nb
                }
            }
            (_, k) => k,
        }
    };
    let mut edges_a = Vec::new();
    let mut edges_b = Vec::new();
    for e in g.edges() {
        let (ru, rv) = (role[e.u].unwrap().0, role[e.v].unwrap().0);
        match (ru.min(rv), ru.max(rv)) {
            (0, 1) => return Err(WirecutError::Partition(format!("edge {}-{} joins A and B", e.u, e.v))),
            (0, _) => edges_a.push((qubit(e.u, 0), qubit(e.v, 0), e.w)),
            (1, _) => edges_b.push((qubit(e.u, 1), qubit(e.v, 1), e.w)),
            _ => unreachable!("no self loops"),
        }
    }
    let harada = harada_decomposition();
    let peng = peng_decomposition();
    for d in [&harada, &peng] {
        let check = verify_qpd(d);
        if !check.passed {
            return Err(WirecutError::Qpd(check.max_deviation));
        }
    }
    Ok(FragmentPair {
        graph: g.clone(),
        params: params.clone(),
        separator,
        side_a: side_a.to_vec(),
        side_b: side_b.to_vec(),
        harada,
        peng,
        edges_a,
        edges_b,
    })
}

fn cost_layer(c: &mut Circuit, edges: &[(usize, usize, f64)], gamma: f64) {
    for &(a, b, w) in edges {
        c.push(Gate::Zz { a, b, theta: gamma * w });
    }
}

fn mixer(c: &mut Circuit, qubits: std::ops::Range<usize>, beta: f64) {
    for q in qubits {
        c.push(Gate::Rx { q, theta: 2.0 * beta });
    }
}

impl FragmentPair {
    pub fn qubits_a(&self) -> usize {
        self.side_a.len() + 1
    }

    pub fn qubits_b(&self) -> usize {
        self.side_b.len() + 1
    }

    pub fn kappa(&self) -> f64 {
        self.harada.kappa() * self.peng.kappa()
    }

    /// Channel pairs `(i_h, i_p)` in enumeration order.
    pub fn channel_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.harada.len())
            .flat_map(|h| (0..self.peng.len()).map(move |p| (h, p)))
            .collect()
    }

    /// Fragment A under channels `(i_h, i_p)`; it never depends on fragment B's outcomes.
    pub fn fragment_a(&self, i_h: usize, i_p: usize) -> Circuit {
        let na = self.side_a.len();
        let c_q = na;
        let (g1, b1, g2, b2) = self.angles();
        let mut c = Circuit::new(na + 1, na + 2, PauliState::Plus);
        cost_layer(&mut c, &self.edges_a, g1);
        c.push(Gate::BasisChange {
            q: c_q,
            basis: self.harada.channels[i_h].basis,
        });
        c.push(Gate::Measure { q: c_q, clbit: na + 1 });
        c.push(Gate::Prepare {
            q: c_q,
            state: self.peng.channels[i_p].prepared_state(0),
        });
        mixer(&mut c, 0..na, b1);
        cost_layer(&mut c, &self.edges_a, g2);
        mixer(&mut c, 0..na + 1, b2);
        for q in 0..=na {
            c.push(Gate::Measure { q, clbit: q });
        }
        c
    }

    /// Fragment B, given fragment A's cut outcome `x_h`.
    pub fn fragment_b(&self, i_h: usize, x_h: u8, i_p: usize) -> Circuit {
        let nb = self.side_b.len();
        let c_q = nb;
        let (g1, b1, g2, b2) = self.angles();
        let mut c = Circuit::new(nb + 1, nb + 1, PauliState::Plus);
        c.init[c_q] = self.harada.channels[i_h].prepared_state(x_h);
        cost_layer(&mut c, &self.edges_b, g1);
        mixer(&mut c, 0..nb + 1, b1);
        cost_layer(&mut c, &self.edges_b, g2);
        c.push(Gate::BasisChange {
            q: c_q,
            basis: self.peng.channels[i_p].basis,
        });
        c.push(Gate::Measure { q: c_q, clbit: nb });
        mixer(&mut c, 0..nb, b2);
        for q in 0..nb {
            c.push(Gate::Measure { q, clbit: q });
        }
        c
    }

    fn angles(&self) -> (f64, f64, f64, f64) {
        let p = &self.params;
        (p.gamma(0), p.beta(0), p.gamma(1), p.beta(1))
    }

    /// Bit string of the full graph contributed by fragment A's `(a, c)` bits.
    pub fn scatter_a(&self, bits: usize) -> u64 {
        let mut s = 0u64;
        for (k, &v) in self.side_a.iter().enumerate() {
            s |= ((bits >> k & 1) as u64) << v;
        }
        s | ((bits >> self.side_a.len() & 1) as u64) << self.separator
    }

    pub fn scatter_b(&self, bits: usize) -> u64 {
        let mut s = 0u64;
        for (k, &v) in self.side_b.iter().enumerate() {
            s |= ((bits >> k & 1) as u64) << v;
        }
        s
    }

    /// Exact outcome distributions of every fragment circuit.
    pub fn tables(&self) -> Result<FragmentTables, WirecutError> {
        let pairs = self.channel_pairs();
        let a: Vec<Distribution> = pairs
            .par_iter()
            .map(|&(h, p)| simulate(&self.fragment_a(h, p)))
            .collect::<Result<_, _>>()?;
        let b: Vec<[Distribution; 2]> = pairs
            .par_iter()
            .map(|&(h, p)| Ok([simulate(&self.fragment_b(h, 0, p))?, simulate(&self.fragment_b(h, 1, p))?]))
            .collect::<Result<_, WirecutError>>()?;
        Ok(FragmentTables { pairs, a, b })
    }
}

/// Simulated fragment distributions, indexed like [`FragmentPair::channel_pairs`].
#[derive(Clone, Debug)]
pub struct FragmentTables {
    pub pairs: Vec<(usize, usize)>,
    /// Joint distribution of `(a, c, x_h)` per channel pair.
    pub a: Vec<Distribution>,
    /// Joint distribution of `(b, x_p)` per channel pair and `x_h`.
    pub b: Vec<[Distribution; 2]>,
}
