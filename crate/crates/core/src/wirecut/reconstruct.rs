use serde::{Deserialize, Serialize};

use super::fragments::{FragmentPair, FragmentTables};
use super::WirecutError;
use crate::qsim::Distribution;

/// Exact reconstruction from all fragment distributions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutEvaluation {
    /// Signed recombination `sum a_h a_p c_xp pA pB`; equals the uncut `p(s)`.
    pub quasi: Vec<f64>,
    /// Distribution `p~(s)` of the sampling protocol.
    pub sampling: Distribution,
    /// `sum_s quasi(s) f(s)`.
    pub expectation: f64,
    /// `sum_s p~(s) f(s)`.
    pub sampling_expectation: f64,
    pub kappa: f64,
}

pub fn evaluate_cut(fp: &FragmentPair, tables: &FragmentTables) -> Result<CutEvaluation, WirecutError> {
    let n = fp.graph.n_vertices();
    let dim = 1usize << n;
    let na = fp.side_a.len();
    let nb = fp.side_b.len();
    let kappa = fp.kappa();
    let mut quasi = vec![0.0; dim];
    let mut sampling = vec![0.0; dim];
    let scatter_a: Vec<u64> = (0..1usize << (na + 1)).map(|k| fp.scatter_a(k)).collect();
    let scatter_b: Vec<u64> = (0..1usize << nb).map(|k| fp.scatter_b(k)).collect();
    for (k, &(h, p)) in tables.pairs.iter().enumerate() {
        let coeff = fp.harada.channels[h].coefficient * fp.peng.channels[p].coefficient;
        let peng = &fp.peng.channels[p];
        let dist_a = &tables.a[k].probs;
        for x_h in 0..2usize {
            let dist_b = &tables.b[k][x_h].probs;
            let mut signed_b = vec![0.0; 1 << nb];
            let mut plain_b = vec![0.0; 1 << nb];
            for (key, &pb) in dist_b.iter().enumerate() {
                let b = key & ((1 << nb) - 1);
                let x_p = (key >> nb) as u8;
                signed_b[b] += peng.sign(x_p) * pb;
                plain_b[b] += pb;
            }
            for (ac, &sa) in scatter_a.iter().enumerate() {
                let pa = dist_a[ac | x_h << (na + 1)];
                if pa == 0.0 {
                    continue;
                }
                for (b, &sb) in scatter_b.iter().enumerate() {
                    let s = (sa | sb) as usize;
                    quasi[s] += coeff * pa * signed_b[b];
                    sampling[s] += coeff.abs() / kappa * pa * plain_b[b];
                }
            }
        }
    }
    let f = fp.graph.cut_weight_table()?;
    let expectation = quasi.iter().zip(&f).map(|(q, f)| q * f).sum();
    let sampling_expectation = sampling.iter().zip(&f).map(|(q, f)| q * f).sum();
    Ok(CutEvaluation {
        quasi,
        sampling: Distribution {
            n_bits: n,
            probs: sampling,
        },
        expectation,
        sampling_expectation,
        kappa,
    })
}

/// `<O>` reconstructed exactly from the fragments.
pub fn cut_expectation_exact(fp: &FragmentPair) -> Result<f64, WirecutError> {
    Ok(evaluate_cut(fp, &fp.tables()?)?.expectation)
}

/// Exact `p~(s)`.
pub fn cut_sampling_distribution(fp: &FragmentPair) -> Result<Distribution, WirecutError> {
    Ok(evaluate_cut(fp, &fp.tables()?)?.sampling)
}
