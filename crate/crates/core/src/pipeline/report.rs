use serde::{Deserialize, Serialize};

use super::{CutOutcome, PipelineError, Reduction, ShrinkOutcome, Stage, StageContext};
use crate::maxcut::{maxcut_brute_force, MAX_BRUTE_FORCE_VERTICES};
use crate::pipeline::PipelineConfig;
use crate::problem::{cut_to_assignment, decode_tour, tsp_brute_force, CutSolution, DecodedTour, Tour, TspInstance};
use crate::qsim::{Distribution, TrainResult};
use crate::shrink::lift_solution;
use crate::wirecut::{bitstring, expectation_overhead, sampling_overhead, SamplingOverhead};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub config: PipelineConfig,
    pub instance: TspInstance,
    pub reduction: ReductionSummary,
    pub separator: SeparatorSummary,
    pub shrink: ShrinkSummary,
    pub training: TrainingSummary,
    pub exact: ExactSummary,
    pub cutting: CuttingSummary,
    pub monte_carlo: Option<MonteCarloSummary>,
    pub decoding: DecodingSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionSummary {
    pub cities: usize,
    pub penalty_a: f64,
    pub penalty_b: f64,
    pub qubo_variables: usize,
    pub qubo_constant: f64,
    pub maxcut_vertices: usize,
    pub maxcut_edges: usize,
    pub maxcut_offset: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparatorSummary {
    pub size: usize,
    pub side_a: usize,
    pub side_b: usize,
    pub beta: usize,
    pub proven_optimal: bool,
    pub nodes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShrinkSummary {
    pub contractions: usize,
    pub vertices_removed: usize,
    pub virtual_contractions: usize,
    pub opposite_side_fixings: usize,
    pub total_offset: f64,
    pub shrunk_vertices: usize,
    pub shrunk_edges: usize,
    pub separator_vertex: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingSummary {
    pub params: Vec<f64>,
    pub expectation_uncut: f64,
    pub evaluations: usize,
}

/// Whether an optimum of the original MaxCut survives shrinking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lossless {
    True,
    False,
    /// The original graph is above the exhaustive-search cap.
    Unverified,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactSummary {
    /// Best cut weight of the shrunk graph.
    pub shrunk_optimum: f64,
    /// `shrunk_optimum + total_offset`, a cut weight of the original graph.
    pub lifted_optimum: f64,
    pub original_optimum: Option<f64>,
    pub lossless: Lossless,
    pub optimal_bitstring: String,
    pub shrunk_optimum_tour: Option<Tour>,
    pub optimal_tour: Tour,
    pub optimal_tour_recoverable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CuttingSummary {
    pub kappa_harada: f64,
    pub kappa_peng: f64,
    pub kappa_joint: f64,
    pub qpd_deviation_harada: f64,
    pub qpd_deviation_peng: f64,
    /// `kappa^2` per cut when estimating expectation values.
    pub expectation_overhead_harada: f64,
    pub expectation_overhead_peng: f64,
    pub expectation_overhead_joint: f64,
    pub qubits_a: usize,
    pub qubits_b: usize,
    pub expectation_uncut: f64,
    pub expectation_cut: f64,
    pub reconstruction_error: f64,
    /// `sum_s p~(s) f(s)`.
    pub expectation_sampling: f64,
    pub floor_holds: bool,
    /// `min_s (p~(s) - p(s) / kappa)`.
    pub floor_min_slack: f64,
    pub entropy_uncut: f64,
    pub entropy_sampling: f64,
    pub p_optimal: f64,
    pub p_tilde_optimal: f64,
    /// Shots to see the optimal string with probability 0.99.
    pub optimal_string_overhead: Option<SamplingOverhead>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub shots: usize,
    pub mean: f64,
    pub standard_error: f64,
    pub z_score: f64,
    pub tv_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    /// Shrunk-graph bit string, vertex 0 first.
    pub bitstring: String,
    pub p_tilde: f64,
    pub p_uncut: f64,
    pub cut_weight: f64,
    pub lifted_weight: f64,
    pub qubo_value: f64,
    pub tour: Option<Tour>,
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodingSummary {
    pub top_k: usize,
    pub candidates: Vec<Candidate>,
    pub feasible_candidates: usize,
    pub best_tour: Option<Tour>,
    pub optimal_length: f64,
    pub found_optimal: bool,
}

pub fn entropy(d: &Distribution) -> f64 {
    -d.probs.iter().filter(|&&p| p > 0.0).map(|p| p * p.ln()).sum::<f64>()
}

const LENGTH_TOLERANCE: f64 = 1e-9;

/// Decodes shrunk bit string `s` into a tour of the input instance.
pub fn decode_shrunk(red: &Reduction, shrink: &ShrinkOutcome, s: u64) -> Result<(CutSolution, Vec<bool>, DecodedTour), PipelineError> {
    let cut = CutSolution::from_bits(&shrink.shrunk, s);
    let lifted = lift_solution(&cut, &shrink.stack).stage(Stage::Decode)?;
    let x = cut_to_assignment(&lifted, &red.maxcut).stage(Stage::Decode)?;
    let encoding = red.qubo.encoding().expect("QUBO built from a TSP");
    let tour = decode_tour(&x, &red.tsp, encoding).stage(Stage::Decode)?;
    Ok((lifted, x, tour))
}

pub fn build_report(
    cfg: &PipelineConfig,
    red: &Reduction,
    shrink: &ShrinkOutcome,
    train: &TrainResult,
    cut: &CutOutcome,
) -> Result<PipelineReport, PipelineError> {
    let encoding = red.qubo.encoding().expect("QUBO built from a TSP");
    let stack = &shrink.stack;
    let reduction = ReductionSummary {
        cities: red.tsp.n_cities(),
        penalty_a: encoding.penalty_a,
        penalty_b: encoding.penalty_b,
        qubo_variables: red.qubo.n_vars(),
        qubo_constant: encoding.constant,
        maxcut_vertices: red.maxcut.n_vertices(),
        maxcut_edges: red.maxcut.n_edges(),
        maxcut_offset: red.maxcut.offset(),
    };
    let separator = SeparatorSummary {
        size: shrink.separator.size(),
        side_a: shrink.separator.a.len(),
        side_b: shrink.separator.b.len(),
        beta: shrink.separator.beta,
        proven_optimal: shrink.separator.proven_optimal,
        nodes: shrink.separator.nodes,
    };
    let shrink_summary = ShrinkSummary {
        contractions: stack.records.len(),
        vertices_removed: red.maxcut.n_vertices() - shrink.shrunk.n_vertices(),
        virtual_contractions: stack.records.iter().filter(|r| r.relaxation_value.is_none()).count(),
        opposite_side_fixings: stack.records.iter().filter(|r| r.sigma == -1).count(),
        total_offset: stack.total_offset(),
        shrunk_vertices: shrink.shrunk.n_vertices(),
        shrunk_edges: shrink.shrunk.n_edges(),
        separator_vertex: (stack.separator.len() == 1).then(|| stack.separator[0]),
    };
    let training = TrainingSummary {
        params: train.params.angles().to_vec(),
        expectation_uncut: train.expectation,
        evaluations: train.evaluations,
    };

    let n_shrunk = shrink.shrunk.n_vertices();
    let best = maxcut_brute_force(&shrink.shrunk).stage(Stage::Report)?;
    let s_star = best.to_bits().min(best.flipped().to_bits());
    let optimal_tour = tsp_brute_force(&red.tsp).stage(Stage::Report)?;
    let (_, _, star_decoded) = decode_shrunk(red, shrink, s_star)?;
    let shrunk_optimum_tour = star_decoded.tour().cloned();
    let original_optimum = if red.maxcut.n_vertices() <= MAX_BRUTE_FORCE_VERTICES {
        Some(maxcut_brute_force(&red.maxcut).stage(Stage::Report)?.weight)
    } else {
        None
    };
    let lifted_optimum = best.weight + stack.total_offset();
    let lossless = match original_optimum {
        Some(o) if (o - lifted_optimum).abs() <= 1e-9 * o.abs().max(1.0) => Lossless::True,
        Some(_) => Lossless::False,
        None => Lossless::Unverified,
    };
    let exact = ExactSummary {
        shrunk_optimum: best.weight,
        lifted_optimum,
        original_optimum,
        lossless,
        optimal_bitstring: bitstring(s_star, n_shrunk),
        optimal_tour_recoverable: shrunk_optimum_tour
            .as_ref()
            .is_some_and(|t| (t.length - optimal_tour.length).abs() <= LENGTH_TOLERANCE),
        shrunk_optimum_tour,
        optimal_tour: optimal_tour.clone(),
    };

    let eval = &cut.eval;
    let p = &cut.uncut.probs;
    let pt = &eval.sampling.probs;
    let floor_min_slack = pt
        .iter()
        .zip(p)
        .map(|(a, b)| a - b / eval.kappa)
        .fold(f64::INFINITY, f64::min);
    let p_optimal = p[s_star as usize];
    let cutting = CuttingSummary {
        kappa_harada: cut.kappa_harada,
        kappa_peng: cut.kappa_peng,
        kappa_joint: eval.kappa,
        qpd_deviation_harada: cut.qpd_harada.max_deviation,
        qpd_deviation_peng: cut.qpd_peng.max_deviation,
        expectation_overhead_harada: expectation_overhead(cut.kappa_harada, 1),
        expectation_overhead_peng: expectation_overhead(cut.kappa_peng, 1),
        expectation_overhead_joint: expectation_overhead(eval.kappa, 1),
        qubits_a: cut.qubits_a,
        qubits_b: cut.qubits_b,
        expectation_uncut: cut.expectation_uncut,
        expectation_cut: eval.expectation,
        reconstruction_error: (eval.expectation - cut.expectation_uncut).abs(),
        expectation_sampling: eval.sampling_expectation,
        floor_holds: floor_min_slack >= -1e-12,
        floor_min_slack,
        entropy_uncut: entropy(&cut.uncut),
        entropy_sampling: entropy(&eval.sampling),
        p_optimal,
        p_tilde_optimal: pt[s_star as usize],
        optimal_string_overhead: sampling_overhead(0.01, p_optimal.min(1.0), eval.kappa).ok(),
    };

    let mut order: Vec<usize> = (0..pt.len()).collect();
    order.sort_by(|&a, &b| pt[b].total_cmp(&pt[a]).then(a.cmp(&b)));
    let mut candidates = Vec::new();
    for &s in order.iter().take(cfg.top_k) {
        let (lifted, x, decoded) = decode_shrunk(red, shrink, s as u64)?;
        let (tour, violations) = match decoded {
            DecodedTour::Tour(t) => (Some(t), 0),
            DecodedTour::Infeasible(v) => (None, v.len()),
        };
        candidates.push(Candidate {
            bitstring: bitstring(s as u64, n_shrunk),
            p_tilde: pt[s],
            p_uncut: p[s],
            cut_weight: shrink.shrunk.cut_weight_bits(s as u64),
            lifted_weight: lifted.weight,
            qubo_value: red.qubo.value(&x).stage(Stage::Decode)?,
            tour,
            violations,
        });
    }
    let best_tour = candidates
        .iter()
        .filter_map(|c| c.tour.clone())
        .min_by(|a, b| a.length.total_cmp(&b.length));
    let decoding = DecodingSummary {
        top_k: cfg.top_k,
        feasible_candidates: candidates.iter().filter(|c| c.tour.is_some()).count(),
        found_optimal: best_tour
            .as_ref()
            .is_some_and(|t| (t.length - optimal_tour.length).abs() <= LENGTH_TOLERANCE),
        best_tour,
        optimal_length: optimal_tour.length,
        candidates,
    };

    Ok(PipelineReport {
        config: cfg.clone(),
        instance: red.tsp.clone(),
        reduction,
        separator,
        shrink: shrink_summary,
        training,
        exact,
        cutting,
        monte_carlo: cut.monte_carlo.clone(),
        decoding,
    })
}

/// Histogram rows `(bitstring, f, p_uncut, p_cut)` over the shrunk graph.
pub fn histogram_csv(shrink: &ShrinkOutcome, cut: &CutOutcome) -> String {
    let n = shrink.shrunk.n_vertices();
    let mut out = String::from("bitstring,f,p_uncut,p_cut\n");
    for (s, (p, pt)) in cut.uncut.probs.iter().zip(&cut.eval.sampling.probs).enumerate() {
        out.push_str(&format!(
            "{},{:?},{:?},{:?}\n",
            bitstring(s as u64, n),
            shrink.shrunk.cut_weight_bits(s as u64),
            p,
            pt
        ));
    }
    out
}
