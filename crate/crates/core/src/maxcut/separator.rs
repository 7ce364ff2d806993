use serde::{Deserialize, Serialize};

use super::MaxCutError;
use crate::linprog::{solve_milp_with, LinearModel, MilpError, MilpOptions, Relation, Sense};
use crate::problem::MaxCutInstance;

/// A balanced vertex separator: no edge joins `a` and `b`, and `||a| - |b|| <= beta`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparatorResult {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub c: Vec<usize>,
    pub beta: usize,
    /// False when branch-and-bound hit its node limit and the best known
    /// separator is returned unproven.
    pub proven_optimal: bool,
    pub nodes: usize,
}

impl SeparatorResult {
    pub fn size(&self) -> usize {
        self.c.len()
    }

    fn from_sides(n: usize, in_a: &[bool], in_b: &[bool], beta: usize, proven_optimal: bool, nodes: usize) -> Self {
        let a = (0..n).filter(|&v| in_a[v]).collect();
        let b = (0..n).filter(|&v| in_b[v]).collect();
        let c = (0..n).filter(|&v| !in_a[v] && !in_b[v]).collect();
        SeparatorResult {
            a,
            b,
            c,
            beta,
            proven_optimal,
            nodes,
        }
    }

    /// Checks the partition, the balance bound, and that removing `c`
    /// disconnects `a` from `b`.
    pub fn validate(&self, g: &MaxCutInstance) -> Result<(), String> {
        let n = g.n_vertices();
        let mut label = vec![0u8; n];
        for (set, tag) in [(&self.a, 1u8), (&self.b, 2), (&self.c, 3)] {
            for &v in set {
                if v >= n {
                    return Err(format!("vertex {v} out of range"));
                }
                if label[v] != 0 {
                    return Err(format!("vertex {v} appears twice"));
                }
                label[v] = tag;
            }
        }
        if let Some(v) = label.iter().position(|&l| l == 0) {
            return Err(format!("vertex {v} not covered"));
        }
        if self.a.len().abs_diff(self.b.len()) > self.beta {
            return Err(format!("sides {} and {} exceed balance {}", self.a.len(), self.b.len(), self.beta));
        }
        // search from A avoiding C must not reach B
        let adj = g.adjacency();
        let mut seen = vec![false; n];
        let mut stack: Vec<usize> = self.a.clone();
        for &v in &self.a {
            seen[v] = true;
        }
        while let Some(v) = stack.pop() {
            for &(t, _) in &adj[v] {
                if label[t] == 2 {
                    return Err(format!("edge path from A reaches B at {t}"));
                }
                if label[t] != 3 && !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparatorOptions {
    pub node_limit: usize,
}

impl Default for SeparatorOptions {
    fn default() -> Self {
        SeparatorOptions { node_limit: 20_000 }
    }
}

/// The integer program: maximize `sum_v x_v + y_v` subject to
/// `x_u + y_v <= 1` and `x_v + y_u <= 1` per edge, `x_v + y_v <= 1` per
/// vertex, and `|sum x - sum y| <= beta`. Columns `0..n` are `x`, `n..2n` are `y`.
pub fn separator_model(g: &MaxCutInstance, beta: usize) -> LinearModel {
    let n = g.n_vertices();
    let mut m = LinearModel::new(Sense::Maximize);
    for v in 0..n {
        m.add_var(format!("x{v}"), 0.0, 1.0, true, 1.0);
    }
    for v in 0..n {
        m.add_var(format!("y{v}"), 0.0, 1.0, true, 1.0);
    }
    for e in g.edges() {
        m.add_constraint(vec![(e.u, 1.0), (n + e.v, 1.0)], Relation::Le, 1.0);
        m.add_constraint(vec![(e.v, 1.0), (n + e.u, 1.0)], Relation::Le, 1.0);
    }
    for v in 0..n {
        m.add_constraint(vec![(v, 1.0), (n + v, 1.0)], Relation::Le, 1.0);
    }
    let diff: Vec<(usize, f64)> = (0..n).map(|v| (v, 1.0)).chain((0..n).map(|v| (n + v, -1.0))).collect();
    m.add_constraint(diff.clone(), Relation::Le, beta as f64);
    m.add_constraint(diff.into_iter().map(|(j, a)| (j, -a)).collect(), Relation::Le, beta as f64);
    m
}

/// Largest `|A'| + |B'|` with `|A'| <= a`, `|B'| <= b`, `||A'| - |B'|| <= beta`.
fn balanced_total(a: usize, b: usize, beta: usize) -> (usize, usize) {
    if a <= b {
        (a, b.min(a + beta))
    } else {
        (a.min(b + beta), b)
    }
}

/// Greedy separator: grow `A` from every seed vertex, each step adding the
/// vertex that keeps the closed neighbourhood of `A` smallest, and let `B`
/// be the vertices outside that neighbourhood.
pub fn greedy_separator(g: &MaxCutInstance, beta: usize) -> SeparatorResult {
    let n = g.n_vertices();
    let adj = g.adjacency();
    let closed: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let mut c: Vec<usize> = adj[v].iter().map(|&(t, _)| t).collect();
            c.push(v);
            c
        })
        .collect();
    let mut best: Option<(usize, Vec<usize>, Vec<bool>)> = None; // (total, A in order, covered)
    let mut best_split = (0, 0);
    for seed in 0..n {
        let mut order = vec![];
        let mut in_a = vec![false; n];
        let mut covered = vec![false; n];
        let mut n_covered = 0;
        let mut next = Some(seed);
        while let Some(x) = next {
            in_a[x] = true;
            order.push(x);
            for &t in &closed[x] {
                if !covered[t] {
                    covered[t] = true;
                    n_covered += 1;
                }
            }
            let (ka, kb) = balanced_total(order.len(), n - n_covered, beta);
            if best.as_ref().is_none_or(|b| ka + kb > b.0) {
                best = Some((ka + kb, order.clone(), covered.clone()));
                best_split = (ka, kb);
            }
            next = (0..n)
                .filter(|&y| !in_a[y])
                .min_by_key(|&y| (closed[y].iter().filter(|&&t| !covered[t]).count(), y));
        }
    }
    let mut in_a = vec![false; n];
    let mut in_b = vec![false; n];
    if let Some((_, order, covered)) = best {
        let (ka, kb) = best_split;
        for &v in order.iter().take(ka) {
            in_a[v] = true;
        }
        for v in (0..n).filter(|&v| !covered[v]).take(kb) {
            in_b[v] = true;
        }
    }
    SeparatorResult::from_sides(n, &in_a, &in_b, beta, false, 0)
}

pub fn balanced_vertex_separator(g: &MaxCutInstance, beta: usize) -> Result<SeparatorResult, MaxCutError> {
    balanced_vertex_separator_with(g, beta, &SeparatorOptions::default())
}

/// Minimum separator by branch-and-bound on [`separator_model`], seeded with
/// the greedy separator. If the node limit is hit the best separator found is
/// returned with `proven_optimal = false`.
pub fn balanced_vertex_separator_with(
    g: &MaxCutInstance,
    beta: usize,
    opts: &SeparatorOptions,
) -> Result<SeparatorResult, MaxCutError> {
    let n = g.n_vertices();
    if n < 3 {
        return Err(MaxCutError::TooSmall(n));
    }
    let model = separator_model(g, beta);
    let greedy = greedy_separator(g, beta);
    let mut start = vec![0.0; 2 * n];
    for &v in &greedy.a {
        start[v] = 1.0;
    }
    for &v in &greedy.b {
        start[n + v] = 1.0;
    }
    let milp_opts = MilpOptions {
        node_limit: opts.node_limit,
        incumbent: Some((start, (greedy.a.len() + greedy.b.len()) as f64)),
    };
    let (values, proven, nodes) = match solve_milp_with(&model, &milp_opts) {
        Ok(r) => (r.values, true, r.nodes),
        Err(MilpError::NodeLimit {
            incumbent: Some(r), nodes, ..
        }) => (r.values, false, nodes),
        Err(MilpError::Infeasible) => return Err(MaxCutError::NoSeparator { beta }),
        Err(e) => return Err(e.into()),
    };
    let in_a: Vec<bool> = (0..n).map(|v| values[v] > 0.5).collect();
    let in_b: Vec<bool> = (0..n).map(|v| values[n + v] > 0.5).collect();
    Ok(SeparatorResult::from_sides(n, &in_a, &in_b, beta, proven, nodes))
}
