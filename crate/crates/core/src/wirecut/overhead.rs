use serde::{Deserialize, Serialize};

use super::WirecutError;

/// Shots needed to see a string of probability `p` at least once with
/// failure probability `delta`, uncut (`n`) and cut (`n_tilde`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingOverhead {
    pub n: u64,
    pub n_tilde: u64,
    pub ratio: f64,
}

fn shots_to_observe(delta: f64, p: f64) -> u64 {
    if p >= 1.0 {
        return 1;
    }
    (delta.ln() / (-p).ln_1p()).ceil().max(1.0) as u64
}

pub fn sampling_overhead(delta: f64, p: f64, kappa: f64) -> Result<SamplingOverhead, WirecutError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(WirecutError::Domain(format!("delta = {delta} outside (0, 1)")));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(WirecutError::Domain(format!("p = {p} outside (0, 1]")));
    }
    if !(kappa >= 1.0) {
        return Err(WirecutError::Domain(format!("kappa = {kappa} below 1")));
    }
    let n = shots_to_observe(delta, p);
    let n_tilde = shots_to_observe(delta, p / kappa);
    Ok(SamplingOverhead {
        n,
        n_tilde,
        ratio: n_tilde as f64 / n as f64,
    })
}

/// Multiplicative shot overhead for estimating expectation values through `cuts` cuts.
pub fn expectation_overhead(kappa: f64, cuts: u32) -> f64 {
    kappa.powi(2 * cuts as i32)
}
