use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{CutOutcome, PipelineError, Reduction, ShrinkOutcome, Stage, StageContext};
use crate::problem::{CutSolution, MaxCutInstance};
use crate::rng::{substream, Substream};
use crate::wirecut::{harada_decomposition, peng_decomposition, verify_qpd};

/// Above this many QUBO variables the reduction check samples assignments.
const EXHAUSTIVE_VARS: usize = 16;
const SAMPLED_ASSIGNMENTS: usize = 4096;
/// Shrunk graphs up to this size have every cut lifted and re-weighed.
const EXHAUSTIVE_SHRUNK: usize = 20;
const TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub max_deviation: f64,
    pub cases: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &str, max_deviation: f64, cases: usize, tol: f64) -> Check {
    Check {
        name: name.to_string(),
        passed: max_deviation <= tol,
        max_deviation,
        cases,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn reduction_check(red: &Reduction, seed: u64) -> Result<Check, PipelineError> {
    let n = red.qubo.n_vars();
    let g = &red.maxcut;
    let eval = |x: &[bool]| -> Result<f64, PipelineError> {
        let mut side = vec![false; n + 1];
        for (i, &xi) in x.iter().enumerate() {
            side[i + 1] = !xi;
        }
        let m = g.cut_weight(&side).stage(Stage::Verify)?;
        let q = red.qubo.value(x).stage(Stage::Verify)?;
        Ok(rel(q, -m / 2.0 + g.offset()))
    };
    let mut worst = 0.0f64;
    let cases = if n <= EXHAUSTIVE_VARS {
        for s in 0..1u64 << n {
            let x: Vec<bool> = (0..n).map(|i| s >> i & 1 == 1).collect();
            worst = worst.max(eval(&x)?);
        }
        1usize << n
    } else {
        let mut rng = substream(seed, Substream::Verify);
        for _ in 0..SAMPLED_ASSIGNMENTS {
            let x: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
            worst = worst.max(eval(&x)?);
        }
        SAMPLED_ASSIGNMENTS
    };
    Ok(check("qubo_maxcut_identity", worst, cases, TOL))
}

fn same_graph(a: &MaxCutInstance, b: &MaxCutInstance) -> f64 {
    if a.n_vertices() != b.n_vertices() || a.n_edges() != b.n_edges() {
        return f64::INFINITY;
    }
    a.edges()
        .iter()
        .zip(b.edges())
        .map(|(x, y)| if (x.u, x.v) == (y.u, y.v) { rel(x.w, y.w) } else { f64::INFINITY })
        .fold(0.0, f64::max)
}

fn shrink_checks(red: &Reduction, shrink: &ShrinkOutcome) -> Result<Vec<Check>, PipelineError> {
    let stack = &shrink.stack;
    let replayed = stack.replay(&red.maxcut).stage(Stage::Verify)?;
    let reverted = stack.revert(&shrink.shrunk).stage(Stage::Verify)?;
    let mut out = vec![
        check("shrink_replay", same_graph(&replayed, &shrink.shrunk), 1, TOL),
        check("shrink_revert", same_graph(&reverted, &red.maxcut), 1, TOL),
    ];
    let n = shrink.shrunk.n_vertices();
    if n <= EXHAUSTIVE_SHRUNK {
        let mut worst = 0.0f64;
        for s in 0..1u64 << n {
            let cut = CutSolution::from_bits(&shrink.shrunk, s);
            let lifted = crate::shrink::lift_solution(&cut, stack).stage(Stage::Verify)?;
            let actual = red.maxcut.cut_weight(&lifted.side).stage(Stage::Verify)?;
            worst = worst.max(rel(actual, lifted.weight));
        }
        out.push(check("shrink_weight_conservation", worst, 1 << n, TOL));
    }
    Ok(out)
}

/// Independent consistency checks over the stage outputs.
pub fn run_checks(
    red: &Reduction,
    shrink: &ShrinkOutcome,
    cut: Option<&CutOutcome>,
    seed: u64,
) -> Result<VerifyReport, PipelineError> {
    let h = verify_qpd(&harada_decomposition());
    let p = verify_qpd(&peng_decomposition());
    let mut checks = vec![
        Check {
            name: "qpd_harada".into(),
            passed: h.passed,
            max_deviation: h.max_deviation,
            cases: 4,
        },
        Check {
            name: "qpd_peng".into(),
            passed: p.passed,
            max_deviation: p.max_deviation,
            cases: 4,
        },
        reduction_check(red, seed)?,
    ];
    checks.extend(shrink_checks(red, shrink)?);
    if let Some(c) = cut {
        let dev = c
            .eval
            .quasi
            .iter()
            .zip(&c.uncut.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        checks.push(check("cut_reconstruction", dev, c.uncut.probs.len(), 1e-10));
        checks.push(check(
            "cut_expectation",
            rel(c.eval.expectation, c.expectation_uncut),
            1,
            TOL,
        ));
    }
    Ok(VerifyReport { checks })
}
