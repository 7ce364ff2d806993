use std::io::{self, Write};

use rand::distributions::{Distribution as _, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Binomial;
use serde::{Deserialize, Serialize};

use super::fragments::{FragmentPair, FragmentTables};
use super::WirecutError;
use crate::qsim::Distribution;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutShot {
    pub shot_index: usize,
    pub i_h: usize,
    pub i_p: usize,
    pub x_h: u8,
    pub x_p: u8,
    /// Bit `k` is vertex `k` of the cut graph.
    pub bitstring: u64,
    pub f_value: f64,
    /// `kappa * sign(a_h a_p) * c_xp * f(s)`.
    pub signed_weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutSamples {
    pub n_bits: usize,
    pub kappa: f64,
    pub shots: Vec<CutShot>,
}

impl CutSamples {
    /// Unbiased estimate of `<O>`.
    pub fn mean_weight(&self) -> f64 {
        self.shots.iter().map(|s| s.signed_weight).sum::<f64>() / self.shots.len() as f64
    }

    pub fn standard_error(&self) -> f64 {
        let n = self.shots.len() as f64;
        if n < 2.0 {
            return f64::INFINITY;
        }
        let mean = self.mean_weight();
        let var = self.shots.iter().map(|s| (s.signed_weight - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    }

    /// Empirical bit-string frequencies, an estimate of `p~`.
    pub fn frequencies(&self) -> Distribution {
        let mut probs = vec![0.0; 1 << self.n_bits];
        for s in &self.shots {
            probs[s.bitstring as usize] += 1.0;
        }
        let n = self.shots.len() as f64;
        probs.iter_mut().for_each(|p| *p /= n);
        Distribution {
            n_bits: self.n_bits,
            probs,
        }
    }

    /// CSV with a header row; bit strings are written vertex 0 first.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "shot_index,i_h,i_p,x_h,x_p,bitstring_s,f_value,signed_weight")?;
        for s in &self.shots {
            writeln!(
                w,
                "{},{},{},{},{},{},{:?},{:?}",
                s.shot_index,
                s.i_h,
                s.i_p,
                s.x_h,
                s.x_p,
                bitstring(s.bitstring, self.n_bits),
                s.f_value,
                s.signed_weight
            )?;
        }
        Ok(())
    }
}

pub fn bitstring(s: u64, n: usize) -> String {
    (0..n).map(|k| if s >> k & 1 == 1 { '1' } else { '0' }).collect()
}

/// Half the L1 distance.
pub fn total_variation(p: &Distribution, q: &Distribution) -> f64 {
    p.probs.iter().zip(&q.probs).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0
}

fn multinomial(rng: &mut ChaCha8Rng, n: u64, weights: &[f64]) -> Vec<u64> {
    let mut left = n;
    let mut mass: f64 = weights.iter().sum();
    let mut counts = Vec::with_capacity(weights.len());
    for (k, &w) in weights.iter().enumerate() {
        let c = if k + 1 == weights.len() {
            left
        } else if left == 0 || w <= 0.0 {
            0
        } else {
            let p = (w / mass).clamp(0.0, 1.0);
            Binomial::new(left, p).expect("p in [0, 1]").sample(rng)
        };
        counts.push(c);
        left -= c;
        mass -= w;
    }
    counts
}

fn draw(rng: &mut ChaCha8Rng, dist: &Distribution, n: u64) -> Vec<usize> {
    if n == 0 {
        return Vec::new();
    }
    let index = WeightedIndex::new(&dist.probs).expect("distribution has positive mass");
    (0..n).map(|_| index.sample(rng)).collect()
}

/// Shot-based execution of the cut protocol.
///
/// Channel pairs get a multinomial share of `n_shots` with probabilities
/// `|a_h a_p| / kappa`. All fragment-A shots of a pair run first; their
/// `x_h` outcomes then fix how many fragment-B shots run per preparation.
pub fn sample_cut(fp: &FragmentPair, tables: &FragmentTables, n_shots: usize, seed: u64) -> Result<CutSamples, WirecutError> {
    if n_shots == 0 {
        return Err(WirecutError::NoShots);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kappa = fp.kappa();
    let weights: Vec<f64> = tables
        .pairs
        .iter()
        .map(|&(h, p)| (fp.harada.channels[h].coefficient * fp.peng.channels[p].coefficient).abs() / kappa)
        .collect();
    let counts = multinomial(&mut rng, n_shots as u64, &weights);
    let na = fp.side_a.len();
    let nb = fp.side_b.len();
    let mut shots = Vec::with_capacity(n_shots);
    for (k, &(h, p)) in tables.pairs.iter().enumerate() {
        let a_shots = draw(&mut rng, &tables.a[k], counts[k]);
        let sign = (fp.harada.channels[h].coefficient * fp.peng.channels[p].coefficient).signum();
        for x_h in 0..2u8 {
            let group: Vec<usize> = a_shots.iter().copied().filter(|&s| (s >> (na + 1)) as u8 == x_h).collect();
            let b_shots = draw(&mut rng, &tables.b[k][usize::from(x_h)], group.len() as u64);
            for (&sa, &sb) in group.iter().zip(&b_shots) {
                let x_p = (sb >> nb) as u8;
                let s = fp.scatter_a(sa & ((1 << (na + 1)) - 1)) | fp.scatter_b(sb & ((1 << nb) - 1));
                let f = fp.graph.cut_weight_bits(s);
                shots.push(CutShot {
                    shot_index: shots.len(),
                    i_h: h,
                    i_p: p,
                    x_h,
                    x_p,
                    bitstring: s,
                    f_value: f,
                    signed_weight: kappa * sign * fp.peng.channels[p].sign(x_p) * f,
                });
            }
        }
    }
    Ok(CutSamples {
        n_bits: fp.graph.n_vertices(),
        kappa,
        shots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{Edge, MaxCutInstance};
    use crate::qsim::QaoaParams;
    use crate::wirecut::{build_fragments, evaluate_cut};

    fn pair() -> FragmentPair {
        let g = MaxCutInstance::new(
            6,
            vec![
                Edge { u: 0, v: 1, w: 1.0 },
                Edge { u: 1, v: 2, w: 0.8 },
                Edge { u: 0, v: 2, w: -0.3 },
                Edge { u: 2, v: 3, w: 1.4 },
                Edge { u: 3, v: 4, w: 0.6 },
                Edge { u: 2, v: 5, w: 1.1 },
                Edge { u: 4, v: 5, w: 0.9 },
            ],
        )
        .unwrap();
        let params = QaoaParams::new(vec![0.6, 0.4, 0.9, 0.2]).unwrap();
        build_fragments(&g, 2, &[0, 1], &[3, 4, 5], &params).unwrap()
    }

    #[test]
    fn estimator_is_close_to_exact() {
        let fp = pair();
        let tables = fp.tables().unwrap();
        let exact = evaluate_cut(&fp, &tables).unwrap();
        let samples = sample_cut(&fp, &tables, 200_000, 5).unwrap();
        assert_eq!(samples.shots.len(), 200_000);
        let err = (samples.mean_weight() - exact.expectation).abs();
        assert!(err < 3.0 * samples.standard_error(), "{err} vs {}", samples.standard_error());
        let tv = total_variation(&samples.frequencies(), &exact.sampling);
        assert!(tv < 0.02, "{tv}");
    }

    #[test]
    fn frequencies_converge() {
        let fp = pair();
        let tables = fp.tables().unwrap();
        let exact = evaluate_cut(&fp, &tables).unwrap();
        let small = total_variation(&sample_cut(&fp, &tables, 10_000, 1).unwrap().frequencies(), &exact.sampling);
        let large = total_variation(&sample_cut(&fp, &tables, 1_000_000, 1).unwrap().frequencies(), &exact.sampling);
        assert!(large < small, "{large} vs {small}");
    }

    #[test]
    fn single_shot_has_kappa_magnitude() {
        let fp = pair();
        let tables = fp.tables().unwrap();
        let s = sample_cut(&fp, &tables, 1, 3).unwrap();
        assert_eq!(s.shots.len(), 1);
        let shot = s.shots[0];
        assert!((shot.signed_weight.abs() - 12.0 * shot.f_value.abs()).abs() < 1e-12);
        assert_eq!(shot.f_value, fp.graph.cut_weight_bits(shot.bitstring));
        assert!(matches!(sample_cut(&fp, &tables, 0, 3), Err(WirecutError::NoShots)));
    }

    #[test]
    fn deterministic_csv() {
        let fp = pair();
        let tables = fp.tables().unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        sample_cut(&fp, &tables, 500, 8).unwrap().write_csv(&mut a).unwrap();
        sample_cut(&fp, &tables, 500, 8).unwrap().write_csv(&mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert_eq!(text.lines().count(), 501);
        assert!(text.starts_with("shot_index,i_h,i_p,x_h,x_p,bitstring_s,f_value,signed_weight\n"));
    }

    #[test]
    fn multinomial_sums_to_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = multinomial(&mut rng, 1000, &[0.2, 0.0, 0.5, 0.3]);
        assert_eq!(c.iter().sum::<u64>(), 1000);
        assert_eq!(c[1], 0);
    }
}
