//! LP-guided shrinking of a vertex separator to a single super-vertex.
//!
//! Each step solves the cycle relaxation of the current graph, picks the
//! separator edge whose value is closest to an integer, and contracts it
//! with sign `+1` (same side, value near 0) or `-1` (opposite sides, value
//! near 1). Cuts of the shrunk graph lift back to the original graph with
//! `weight = shrunk weight + accumulated offset`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::maxcut::{solve_cycle_relaxation, MaxCutError, SeparatorResult};
use crate::problem::{CutSolution, MaxCutInstance, ProblemError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShrinkError {
    #[error(transparent)]
    MaxCut(#[from] MaxCutError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("separator is empty")]
    EmptySeparator,
    #[error("shrink target must be at least 1")]
    BadTarget,
    #[error("no separator edges to choose from")]
    NoCandidates,
    #[error("stack does not match graph: {0}")]
    Mismatch(String),
}

/// One signed contraction: vertex `u` merged into `v` (indices of the graph before the step).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionRecord {
    pub u: usize,
    pub v: usize,
    pub sigma: i8,
    /// Relaxation value of the contracted edge; `None` for a virtual edge.
    pub relaxation_value: Option<f64>,
    pub offset_delta: f64,
    pub removed_u_edges: Vec<(usize, f64)>,
    pub prior_v_edges: Vec<(usize, f64)>,
    pub root_before: Option<usize>,
}

/// Where an original vertex ended up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexImage {
    pub vertex: usize,
    /// The original vertex sits on the opposite side of its image.
    pub flipped: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShrinkStack {
    pub original_vertices: usize,
    pub records: Vec<ContractionRecord>,
    pub provenance: Vec<VertexImage>,
    /// Images of the separator in the shrunk graph (one vertex when shrunk fully).
    pub separator: Vec<usize>,
    pub side_a: Vec<usize>,
    pub side_b: Vec<usize>,
}

impl ShrinkStack {
    pub fn identity(n: usize) -> Self {
        ShrinkStack {
            original_vertices: n,
            records: Vec::new(),
            provenance: (0..n).map(|v| VertexImage { vertex: v, flipped: false }).collect(),
            separator: Vec::new(),
            side_a: Vec::new(),
            side_b: Vec::new(),
        }
    }

    pub fn total_offset(&self) -> f64 {
        self.records.iter().map(|r| r.offset_delta).sum()
    }

    pub fn shrunk_vertices(&self) -> usize {
        self.original_vertices - self.records.len()
    }

    fn push(&mut self, record: ContractionRecord) {
        let (u, v, flip) = (record.u, record.v, record.sigma == -1);
        let shift = |k: usize| if k > u { k - 1 } else { k };
        for img in &mut self.provenance {
            if img.vertex == u {
                img.vertex = shift(v);
                img.flipped ^= flip;
            } else {
                img.vertex = shift(img.vertex);
            }
        }
        for list in [&mut self.separator, &mut self.side_a, &mut self.side_b] {
            let mut moved: Vec<usize> = list.iter().map(|&k| if k == u { shift(v) } else { shift(k) }).collect();
            moved.sort_unstable();
            moved.dedup();
            *list = moved;
        }
        self.records.push(record);
    }

    /// Re-applies every contraction to `g` (which must be the original graph).
    pub fn replay(&self, g: &MaxCutInstance) -> Result<MaxCutInstance, ShrinkError> {
        if g.n_vertices() != self.original_vertices {
            return Err(ShrinkError::Mismatch(format!(
                "graph has {} vertices, stack expects {}",
                g.n_vertices(),
                self.original_vertices
            )));
        }
        let mut cur = g.clone();
        for r in &self.records {
            cur = cur.contract(r.u, r.v, r.sigma)?.graph;
        }
        Ok(cur)
    }

    /// Undoes every contraction, recovering the original graph from the shrunk one.
    pub fn revert(&self, shrunk: &MaxCutInstance) -> Result<MaxCutInstance, ShrinkError> {
        if shrunk.n_vertices() != self.shrunk_vertices() {
            return Err(ShrinkError::Mismatch(format!(
                "graph has {} vertices, stack expects {}",
                shrunk.n_vertices(),
                self.shrunk_vertices()
            )));
        }
        let mut cur = shrunk.clone();
        for r in self.records.iter().rev() {
            cur = cur.uncontract(r.u, r.v, &r.removed_u_edges, &r.prior_v_edges, r.offset_delta, r.root_before)?;
        }
        Ok(cur)
    }
}

/// Contracts `u` into `v` with sign `sigma`; see [`MaxCutInstance::contract`].
pub fn contract_edge(
    g: &MaxCutInstance,
    u: usize,
    v: usize,
    sigma: i8,
    relaxation_value: Option<f64>,
) -> Result<(MaxCutInstance, ContractionRecord), ShrinkError> {
    let c = g.contract(u, v, sigma)?;
    let record = ContractionRecord {
        u,
        v,
        sigma,
        relaxation_value,
        offset_delta: c.offset_delta,
        removed_u_edges: c.removed_u_edges,
        prior_v_edges: c.prior_v_edges,
        root_before: g.root_vertex(),
    };
    Ok((c.graph, record))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fixing {
    /// Index into the graph's edge list.
    pub edge: usize,
    pub sigma: i8,
    pub value: f64,
}

/// How to choose among separator edges equally close to integral.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Lexicographically smallest edge.
    #[default]
    Lexicographic,
    /// Largest `|w|`, then lexicographically smallest.
    Heaviest,
}

/// The candidate edge whose relaxation value is closest to 0 or 1, ties
/// resolved by `tie`. `sigma = +1` below 0.5.
pub fn choose_fixing_from_values(
    values: &[f64],
    weights: &[f64],
    candidates: &[usize],
    tie: TieBreak,
) -> Result<Fixing, ShrinkError> {
    let mut best: Option<(f64, f64, usize)> = None;
    for &k in candidates {
        let x = values[k];
        let dist = x.min(1.0 - x);
        let w = match tie {
            TieBreak::Lexicographic => 0.0,
            TieBreak::Heaviest => weights[k].abs(),
        };
        // edges are stored in lexicographic order, so the index is the last key
        let better = match best {
            None => true,
            Some((d, bw, bk)) => {
                dist < d - 1e-9 || (dist <= d + 1e-9 && (w > bw + 1e-12 || (w >= bw - 1e-12 && k < bk)))
            }
        };
        if better {
            best = Some((dist, w, k));
        }
    }
    let (_, _, edge) = best.ok_or(ShrinkError::NoCandidates)?;
    let value = values[edge];
    Ok(Fixing {
        edge,
        sigma: if value < 0.5 { 1 } else { -1 },
        value,
    })
}

/// Solves the cycle relaxation of `g` and picks a fixing among `candidates`.
pub fn choose_fixing(g: &MaxCutInstance, candidates: &[usize], tie: TieBreak) -> Result<Fixing, ShrinkError> {
    if candidates.is_empty() {
        return Err(ShrinkError::NoCandidates);
    }
    let relax = solve_cycle_relaxation(g)?;
    let weights: Vec<f64> = g.edges().iter().map(|e| e.w).collect();
    choose_fixing_from_values(&relax.values, &weights, candidates, tie)
}

pub fn shrink_separator_to_vertex(g: &MaxCutInstance, sep: &SeparatorResult) -> Result<(MaxCutInstance, ShrinkStack), ShrinkError> {
    shrink_separator(g, sep, 1)
}

/// [`shrink_separator_with`] using lexicographic tie-breaking.
pub fn shrink_separator(
    g: &MaxCutInstance,
    sep: &SeparatorResult,
    target: usize,
) -> Result<(MaxCutInstance, ShrinkStack), ShrinkError> {
    shrink_separator_with(g, sep, target, TieBreak::Lexicographic)
}

/// Contracts separator vertices until `target` of them remain.
///
/// When no real edge joins two remaining separator vertices, the two
/// smallest are merged through a virtual edge with `sigma = +1`.
pub fn shrink_separator_with(
    g: &MaxCutInstance,
    sep: &SeparatorResult,
    target: usize,
    tie: TieBreak,
) -> Result<(MaxCutInstance, ShrinkStack), ShrinkError> {
    if target == 0 {
        return Err(ShrinkError::BadTarget);
    }
    if sep.c.is_empty() {
        return Err(ShrinkError::EmptySeparator);
    }
    if sep.c.iter().chain(&sep.a).chain(&sep.b).any(|&v| v >= g.n_vertices()) {
        return Err(ShrinkError::Mismatch("separator references missing vertices".into()));
    }
    let mut stack = ShrinkStack::identity(g.n_vertices());
    stack.separator = sep.c.clone();
    stack.side_a = sep.a.clone();
    stack.side_b = sep.b.clone();
    let mut cur = g.clone();
    while stack.separator.len() > target {
        let in_sep = {
            let mut m = vec![false; cur.n_vertices()];
            for &v in &stack.separator {
                m[v] = true;
            }
            m
        };
        let candidates: Vec<usize> = (0..cur.n_edges())
            .filter(|&k| {
                let e = cur.edges()[k];
                in_sep[e.u] && in_sep[e.v]
            })
            .collect();
        let (u, v, sigma, value) = if candidates.is_empty() {
            (stack.separator[1], stack.separator[0], 1, None)
        } else {
            let f = choose_fixing(&cur, &candidates, tie)?;
            let e = cur.edges()[f.edge];
            (e.v, e.u, f.sigma, Some(f.value))
        };
        let (next, record) = contract_edge(&cur, u, v, sigma, value)?;
        stack.push(record);
        cur = next;
    }
    Ok((cur, stack))
}

/// Lifts a cut of the shrunk graph to the original vertex set.
pub fn lift_solution(cut: &CutSolution, stack: &ShrinkStack) -> Result<CutSolution, ShrinkError> {
    if cut.side.len() != stack.shrunk_vertices() {
        return Err(ShrinkError::Mismatch(format!(
            "cut has {} vertices, shrunk graph has {}",
            cut.side.len(),
            stack.shrunk_vertices()
        )));
    }
    let side = stack.provenance.iter().map(|img| cut.side[img.vertex] ^ img.flipped).collect();
    Ok(CutSolution {
        side,
        weight: cut.weight + stack.total_offset(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxcut::{balanced_vertex_separator, maxcut_brute_force};
    use crate::problem::Edge;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> MaxCutInstance {
        let mut edges = vec![];
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    edges.push(Edge { u, v, w: rng.gen_range(-1.0..2.0) });
                }
            }
        }
        MaxCutInstance::new(n, edges).unwrap()
    }

    fn best(g: &MaxCutInstance, ok: impl Fn(u64) -> bool) -> f64 {
        (0u64..1 << g.n_vertices())
            .filter(|&s| ok(s))
            .map(|s| g.cut_weight_bits(s))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn plus_contraction_relabels() {
        // t=0 joined to u=2 only
        let g = MaxCutInstance::new(3, vec![Edge { u: 0, v: 2, w: 3.0 }]).unwrap();
        let (h, r) = contract_edge(&g, 2, 1, 1, None).unwrap();
        assert_eq!(h.weight(0, 1), Some(3.0));
        assert_eq!(r.offset_delta, 0.0);
    }

    #[test]
    fn minus_contraction_of_k2_forces_the_edge() {
        let g = MaxCutInstance::new(2, vec![Edge { u: 0, v: 1, w: 2.0 }]).unwrap();
        let (h, r) = contract_edge(&g, 1, 0, -1, None).unwrap();
        assert_eq!(h.n_vertices(), 1);
        assert_eq!(h.n_edges(), 0);
        assert_eq!(r.offset_delta, 2.0);
    }

    #[test]
    fn contraction_semantics_are_exact_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let g = random_graph(8, 0.5, &mut rng);
            let u = rng.gen_range(0..8);
            let v = (u + rng.gen_range(1..8)) % 8;
            for sigma in [1i8, -1] {
                let (h, r) = contract_edge(&g, u, v, sigma, None).unwrap();
                let mut stack = ShrinkStack::identity(8);
                stack.push(r.clone());
                for s in 0u64..1 << 7 {
                    let cut = CutSolution::from_bits(&h, s);
                    let lifted = lift_solution(&cut, &stack).unwrap();
                    assert_eq!(lifted.side[u] == lifted.side[v], sigma == 1);
                    let direct = g.cut_weight(&lifted.side).unwrap();
                    assert!((direct - lifted.weight).abs() < 1e-9);
                }
                let respecting = best(&g, |s| ((s >> u ^ s >> v) & 1 == 0) == (sigma == 1));
                assert!((respecting - (best(&h, |_| true) + r.offset_delta)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn fixing_rules() {
        let values = [0.3, 0.02, 0.6, 0.98, 0.5, 0.5, 2.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0];
        let weights = [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0, -3.0, 3.0];
        assert_eq!(
            choose_fixing_from_values(&values, &weights, &[0, 1, 2], TieBreak::Lexicographic).unwrap(),
            Fixing { edge: 1, sigma: 1, value: 0.02 }
        );
        assert_eq!(choose_fixing_from_values(&values, &weights, &[0, 2, 3], TieBreak::Lexicographic).unwrap().sigma, -1);
        let tie = choose_fixing_from_values(&values, &weights, &[5, 4], TieBreak::Lexicographic).unwrap();
        assert_eq!((tie.edge, tie.sigma), (4, -1));
        let lex = choose_fixing_from_values(&values, &weights, &[6, 8, 7], TieBreak::Lexicographic).unwrap();
        assert_eq!((lex.edge, lex.sigma), (6, -1));
        let heavy = choose_fixing_from_values(&values, &weights, &[6, 8, 7], TieBreak::Heaviest).unwrap();
        assert_eq!((heavy.edge, heavy.sigma), (7, -1));
        assert!(choose_fixing_from_values(&values, &weights, &[], TieBreak::Heaviest).is_err());
    }

    #[test]
    fn single_vertex_separator_is_identity() {
        let g = MaxCutInstance::new(3, vec![Edge { u: 0, v: 1, w: 1.0 }, Edge { u: 1, v: 2, w: 1.0 }]).unwrap();
        let sep = balanced_vertex_separator(&g, 0).unwrap();
        let (h, stack) = shrink_separator_to_vertex(&g, &sep).unwrap();
        assert_eq!(h, g);
        assert!(stack.records.is_empty());
        let cut = CutSolution::from_bits(&h, 0b010);
        assert_eq!(lift_solution(&cut, &stack).unwrap(), cut);
    }

    #[test]
    fn shrinking_random_graphs_is_conservative() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut exact_hits = 0;
        for _ in 0..60 {
            let n = rng.gen_range(5..=10);
            let g = random_graph(n, 0.5, &mut rng);
            let sep = balanced_vertex_separator(&g, 1).unwrap();
            if sep.c.is_empty() {
                // disconnected graphs can split without a separator
                continue;
            }
            let (h, stack) = shrink_separator_to_vertex(&g, &sep).unwrap();
            assert_eq!(h.n_vertices(), n - sep.size() + 1);
            assert_eq!(stack.separator.len(), 1);
            let s = stack.separator[0];
            // the super-vertex separates the images of A and B
            for e in h.edges() {
                let side = |x: usize| (stack.side_a.contains(&x), stack.side_b.contains(&x));
                assert!(!(side(e.u).0 && side(e.v).1 || side(e.u).1 && side(e.v).0), "edge {e:?} crosses, sep {s}");
            }
            for sh in 0u64..1 << h.n_vertices() {
                let lifted = lift_solution(&CutSolution::from_bits(&h, sh), &stack).unwrap();
                assert!((g.cut_weight(&lifted.side).unwrap() - lifted.weight).abs() < 1e-9);
            }
            let shrunk_opt = maxcut_brute_force(&h).unwrap().weight + stack.total_offset();
            let opt = maxcut_brute_force(&g).unwrap().weight;
            assert!(shrunk_opt <= opt + 1e-9);
            // equality iff some optimum respects every fixing
            let respects = |s: u64| {
                stack.provenance.iter().enumerate().all(|(o, img)| {
                    stack.provenance.iter().enumerate().all(|(o2, img2)| {
                        img.vertex != img2.vertex || (((s >> o ^ s >> o2) & 1 == 1) == (img.flipped != img2.flipped))
                    })
                })
            };
            let opt_respecting = best(&g, respects);
            assert!((opt_respecting - shrunk_opt).abs() < 1e-9);
            if (shrunk_opt - opt).abs() < 1e-9 {
                exact_hits += 1;
            }
        }
        assert!(exact_hits > 0);
    }

    #[test]
    fn replay_revert_and_json() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = random_graph(10, 0.4, &mut rng);
        let sep = balanced_vertex_separator(&g, 0).unwrap();
        let (h, stack) = shrink_separator_to_vertex(&g, &sep).unwrap();
        assert_eq!(stack.replay(&g).unwrap(), h);
        assert_eq!(stack.revert(&h).unwrap(), g);
        let text = crate::jsonfmt::to_string(&stack).unwrap();
        let back: ShrinkStack = serde_json::from_str(&text).unwrap();
        assert_eq!(back, stack);
    }

    #[test]
    fn disconnected_separator_uses_virtual_edges() {
        // two paths 0-1-2 and 3-4-5 joined by a single separator layer {1, 4} with no edge between them
        let g = MaxCutInstance::new(
            6,
            vec![
                Edge { u: 0, v: 1, w: 1.0 },
                Edge { u: 1, v: 2, w: 1.0 },
                Edge { u: 3, v: 4, w: 1.0 },
                Edge { u: 4, v: 5, w: 1.0 },
            ],
        )
        .unwrap();
        let sep = SeparatorResult {
            a: vec![0, 3],
            b: vec![2, 5],
            c: vec![1, 4],
            beta: 0,
            proven_optimal: false,
            nodes: 0,
        };
        let (h, stack) = shrink_separator_to_vertex(&g, &sep).unwrap();
        assert_eq!(h.n_vertices(), 5);
        assert_eq!(stack.records[0].relaxation_value, None);
        assert_eq!(stack.records[0].sigma, 1);
        assert_eq!(stack.records[0].offset_delta, 0.0);
    }

    proptest! {
        #[test]
        fn apply_then_revert_is_identity(seed in 0u64..10_000, sigma in prop::sample::select(vec![1i8, -1])) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(2..9);
            let g = random_graph(n, 0.6, &mut rng);
            let u = rng.gen_range(0..n);
            let v = (u + rng.gen_range(1..n)) % n;
            let (h, r) = contract_edge(&g, u, v, sigma, None).unwrap();
            prop_assert_eq!(h.n_vertices(), n - 1);
            let back = h.uncontract(r.u, r.v, &r.removed_u_edges, &r.prior_v_edges, r.offset_delta, r.root_before).unwrap();
            prop_assert_eq!(back, g);
        }
    }
}
