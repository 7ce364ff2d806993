use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use super::simplex::Simplex;
use super::{LinearModel, LpError, LpStatus, Sense, FEAS_TOL, INT_TOL, OBJ_TOL};

#[derive(Clone, Debug, PartialEq)]
pub struct MilpOptions {
    pub node_limit: usize,
    /// Known feasible point and its objective, used for pruning from the start.
    pub incumbent: Option<(Vec<f64>, f64)>,
}

impl Default for MilpOptions {
    fn default() -> Self {
        MilpOptions {
            node_limit: 100_000,
            incumbent: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MilpResult {
    pub values: Vec<f64>,
    pub objective: f64,
    pub nodes: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MilpError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("integer program is infeasible")]
    Infeasible,
    #[error("relaxation is unbounded")]
    Unbounded,
    #[error("node limit reached after {nodes} nodes (best bound {best_bound})")]
    NodeLimit {
        incumbent: Option<MilpResult>,
        nodes: usize,
        best_bound: f64,
    },
}

/// Open node; `key` is the relaxation bound in maximization form.
struct Node {
    key: f64,
    id: usize,
    bounds: Vec<(f64, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        // larger bound first, then older node
        self.key.total_cmp(&other.key).then(other.id.cmp(&self.id))
    }
}

pub fn solve_milp(model: &LinearModel) -> Result<MilpResult, MilpError> {
    solve_milp_with(model, &MilpOptions::default())
}

/// Best-bound branch-and-bound, branching on the most fractional integer variable.
pub fn solve_milp_with(model: &LinearModel, opts: &MilpOptions) -> Result<MilpResult, MilpError> {
    model.validate()?;
    let to_max = |v: f64| if model.sense == Sense::Maximize { v } else { -v };
    let integral_objective = model
        .variables
        .iter()
        .zip(&model.objective)
        .all(|(v, &c)| if v.integer { c.fract() == 0.0 } else { c == 0.0 });
    let int_vars: Vec<usize> = (0..model.n_vars()).filter(|&j| model.variables[j].integer).collect();

    let mut best: Option<MilpResult> = opts.incumbent.as_ref().map(|(x, obj)| MilpResult {
        values: x.clone(),
        objective: *obj,
        nodes: 0,
    });
    let prunable = |bound: f64, best: &Option<MilpResult>| -> bool {
        let Some(b) = best else { return false };
        let inc = to_max(b.objective);
        if integral_objective {
            (bound + INT_TOL).floor() <= inc + OBJ_TOL
        } else {
            bound <= inc + OBJ_TOL
        }
    };

    let root: Vec<(f64, f64)> = model
        .variables
        .iter()
        .map(|v| if v.integer { (v.lower.ceil(), v.upper.floor()) } else { (v.lower, v.upper) })
        .collect();
    let mut heap = BinaryHeap::new();
    heap.push(Node {
        key: f64::INFINITY,
        id: 0,
        bounds: root,
    });
    let mut next_id = 1;
    let mut nodes = 0;
    let mut saw_unbounded = false;

    while let Some(node) = heap.pop() {
        if prunable(node.key, &best) {
            continue;
        }
        if nodes >= opts.node_limit {
            let best_bound = heap.iter().map(|n| n.key).fold(node.key, f64::max);
            return Err(MilpError::NodeLimit {
                incumbent: best.map(|b| MilpResult { nodes, ..b }),
                nodes,
                best_bound: to_max(best_bound),
            });
        }
        nodes += 1;
        if node.bounds.iter().any(|&(lo, hi)| lo > hi) {
            continue;
        }
        let lp = Simplex::with_bounds(model, &node.bounds)?.solve()?;
        match lp.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                saw_unbounded = true;
                continue;
            }
            LpStatus::Optimal => {}
        }
        let bound = to_max(lp.objective);
        if prunable(bound, &best) {
            continue;
        }
        let branch = int_vars
            .iter()
            .map(|&j| (j, (lp.values[j] - lp.values[j].round()).abs()))
            .filter(|&(_, f)| f > INT_TOL)
            .fold(None::<(usize, f64)>, |acc, (j, f)| match acc {
                Some((_, bf)) if bf >= f - 1e-12 => acc,
                _ => Some((j, f)),
            });
        match branch {
            None => {
                let mut values = lp.values;
                for &j in &int_vars {
                    values[j] = values[j].round();
                }
                debug_assert!(model.max_violation(&values) < 10.0 * FEAS_TOL);
                let objective = model.objective_value(&values);
                if best.as_ref().is_none_or(|b| to_max(objective) > to_max(b.objective) + OBJ_TOL) {
                    best = Some(MilpResult { values, objective, nodes });
                }
            }
            Some((j, _)) => {
                let v = lp.values[j];
                let mut down = node.bounds.clone();
                down[j].1 = v.floor();
                let mut up = node.bounds;
                up[j].0 = v.ceil();
                for bounds in [down, up] {
                    heap.push(Node { key: bound, id: next_id, bounds });
                    next_id += 1;
                }
            }
        }
    }
    match best {
        Some(b) => Ok(MilpResult { nodes, ..b }),
        None if saw_unbounded => Err(MilpError::Unbounded),
        None => Err(MilpError::Infeasible),
    }
}
