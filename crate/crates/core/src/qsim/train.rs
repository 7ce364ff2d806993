use std::cell::RefCell;
use std::f64::consts::{FRAC_PI_2, PI};

use cobyla::{minimize, Func, RhoBeg, StopTols};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::qaoa::{qaoa_expectation, QaoaParams};
use super::SimError;
use crate::problem::MaxCutInstance;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub layers: usize,
    pub restarts: usize,
    pub max_evals: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            layers: 2,
            restarts: 10,
            max_evals: 250,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainResult {
    pub params: QaoaParams,
    pub expectation: f64,
    pub evaluations: usize,
    /// Best expectation seen after each evaluation, restarts concatenated in order.
    pub best_history: Vec<f64>,
}

/// Search box: `gamma` in `[0, 2 pi / mean|w|]`, `beta` in `[0, pi/2]`.
///
/// `(gamma, beta) -> (-gamma, -beta)` conjugates the state and `beta -> beta + pi/2`
/// complements every bit string, so this box reaches every expectation value
/// when the weights are commensurate with their mean.
fn search_box(g: &MaxCutInstance, layers: usize) -> Vec<(f64, f64)> {
    let mean = g.edges().iter().map(|e| e.w.abs()).sum::<f64>() / g.n_edges().max(1) as f64;
    let gamma_max = if mean > 0.0 { 2.0 * PI / mean } else { 2.0 * PI };
    (0..layers).flat_map(|_| [(0.0, gamma_max), (0.0, FRAC_PI_2)]).collect()
}

fn to_params(u: &[f64], bounds: &[(f64, f64)]) -> QaoaParams {
    let angles = u.iter().zip(bounds).map(|(&x, &(lo, hi))| lo + x * (hi - lo)).collect();
    QaoaParams::new(angles).expect("two angles per layer")
}

/// Maximises the exact uncut expectation with multistart COBYLA in
/// unit-box coordinates. Deterministic per seed.
pub fn train_qaoa(g: &MaxCutInstance, cfg: &TrainConfig) -> Result<TrainResult, SimError> {
    if cfg.layers == 0 {
        return Err(SimError::LayerMismatch { expected: 1, got: 0 });
    }
    // fail early on size problems instead of inside the optimizer callback
    qaoa_expectation(g, &QaoaParams::zeros(cfg.layers))?;
    let bounds = search_box(g, cfg.layers);
    let dims = bounds.len();
    let runs: Vec<(Vec<f64>, f64, Vec<f64>)> = (0..cfg.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(r as u64);
            let start: Vec<f64> = (0..dims).map(|_| rng.gen_range(0.0..1.0)).collect();
            let history = RefCell::new(Vec::with_capacity(cfg.max_evals));
            let best = RefCell::new((start.clone(), f64::NEG_INFINITY));
            let objective = |u: &[f64], _: &mut ()| -> f64 {
                let value = qaoa_expectation(g, &to_params(u, &bounds)).unwrap_or(f64::NEG_INFINITY);
                let mut b = best.borrow_mut();
                if value > b.1 {
                    *b = (u.to_vec(), value);
                }
                history.borrow_mut().push(b.1);
                -value
            };
            let cons: Vec<&dyn Func<()>> = vec![];
            let unit = vec![(0.0, 1.0); dims];
            let tols = StopTols {
                ftol_rel: 1e-10,
                xtol_rel: 1e-8,
                ..StopTols::default()
            };
            // the optimizer's own result is ignored in favour of the best evaluation seen
            let _ = minimize(objective, &start, &unit, &cons, (), cfg.max_evals, RhoBeg::All(0.25), Some(tols));
            let (u, value) = best.into_inner();
            (u, value, history.into_inner())
        })
        .collect();
    let mut best_history = Vec::new();
    let mut best: Option<(Vec<f64>, f64)> = None;
    for (u, value, history) in runs {
        let floor = best.as_ref().map_or(f64::NEG_INFINITY, |b| b.1);
        best_history.extend(history.into_iter().map(|h| h.max(floor)));
        if best.as_ref().is_none_or(|b| value > b.1) {
            best = Some((u, value));
        }
    }
    let (u, expectation) = best.expect("at least one restart");
    Ok(TrainResult {
        params: to_params(&u, &bounds),
        expectation,
        evaluations: best_history.len(),
        best_history,
    })
}
