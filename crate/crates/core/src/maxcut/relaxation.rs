use serde::{Deserialize, Serialize};

use super::separation::separate_odd_cycles;
use super::MaxCutError;
use crate::linprog::{LinearModel, LpStatus, Sense, Simplex};
use crate::problem::MaxCutInstance;

/// Inequalities added per cutting-plane round.
const CUTS_PER_ROUND: usize = 50;
const MAX_ROUNDS: usize = 10_000;

/// Optimum of the cycle relaxation: one value in `[0, 1]` per edge of the graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionalCut {
    pub values: Vec<f64>,
    pub objective: f64,
    /// Odd-cycle rows added over all components.
    pub cuts_added: usize,
}

impl FractionalCut {
    pub fn is_integral(&self, tol: f64) -> bool {
        self.values.iter().all(|&x| x.min(1.0 - x) <= tol)
    }
}

/// Maximizes `sum w_e x_e` over the cycle relaxation by cutting planes,
/// separately on every connected component.
///
/// Each round adds the most violated odd-cycle inequalities found and
/// re-optimizes with the dual simplex; the loop ends when an exact
/// separation pass finds nothing.
pub fn solve_cycle_relaxation(g: &MaxCutInstance) -> Result<FractionalCut, MaxCutError> {
    let mut values = vec![0.0; g.n_edges()];
    let mut cuts_added = 0;
    let comps = g.components();
    let mut comp_of = vec![0; g.n_vertices()];
    for (c, members) in comps.iter().enumerate() {
        for &v in members {
            comp_of[v] = c;
        }
    }
    // edge indices of the whole graph grouped by component
    let mut edge_of = vec![Vec::new(); comps.len()];
    for (k, e) in g.edges().iter().enumerate() {
        edge_of[comp_of[e.u]].push(k);
    }
    for (c, members) in comps.iter().enumerate() {
        if edge_of[c].is_empty() {
            continue;
        }
        let sub = g.induced(members);
        // induced() keeps canonical order, which matches the order of edge_of[c]
        debug_assert_eq!(sub.n_edges(), edge_of[c].len());
        let (x, added) = solve_connected(&sub)?;
        cuts_added += added;
        for (local, &global) in edge_of[c].iter().enumerate() {
            values[global] = x[local];
        }
    }
    let objective = g.edges().iter().zip(&values).map(|(e, x)| e.w * x).sum();
    Ok(FractionalCut {
        values,
        objective,
        cuts_added,
    })
}

fn solve_connected(g: &MaxCutInstance) -> Result<(Vec<f64>, usize), MaxCutError> {
    let mut model = LinearModel::new(Sense::Maximize);
    for e in g.edges() {
        model.add_var(format!("x_{}_{}", e.u, e.v), 0.0, 1.0, false, e.w);
    }
    let mut lp = Simplex::new(&model)?;
    let mut sol = lp.solve()?;
    let mut added = 0;
    for _ in 0..MAX_ROUNDS {
        match sol.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => return Err(MaxCutError::RelaxationStatus("infeasible")),
            LpStatus::Unbounded => return Err(MaxCutError::RelaxationStatus("unbounded")),
        }
        let x: Vec<f64> = sol.values.iter().map(|v| v.clamp(0.0, 1.0)).collect();
        let cuts = separate_odd_cycles(g, &x, CUTS_PER_ROUND);
        if cuts.is_empty() {
            return Ok((x, added));
        }
        added += cuts.len();
        let rows: Vec<_> = cuts.iter().map(|c| c.to_constraint(|e| e)).collect();
        sol = lp.add_rows_and_resolve(&rows)?;
    }
    Err(MaxCutError::RelaxationStatus("not converged"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxcut::maxcut_brute_force;
    use crate::problem::Edge;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit(n: usize, pairs: &[(usize, usize)]) -> MaxCutInstance {
        MaxCutInstance::new(n, pairs.iter().map(|&(u, v)| Edge { u, v, w: 1.0 }).collect()).unwrap()
    }

    #[test]
    fn triangle_relaxation_is_two() {
        let r = solve_cycle_relaxation(&unit(3, &[(0, 1), (1, 2), (0, 2)])).unwrap();
        assert!((r.objective - 2.0).abs() < 1e-9);
        assert!(r.values.iter().sum::<f64>() <= 2.0 + 1e-9);
    }

    #[test]
    fn single_edge_is_cut() {
        let g = MaxCutInstance::new(2, vec![Edge { u: 0, v: 1, w: 2.5 }]).unwrap();
        let r = solve_cycle_relaxation(&g).unwrap();
        assert_eq!(r.values, vec![1.0]);
        assert!((r.objective - 2.5).abs() < 1e-12);
    }

    #[test]
    fn k4_bound_dominates_integer_optimum() {
        let g = unit(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let r = solve_cycle_relaxation(&g).unwrap();
        assert!(r.objective >= 4.0 - 1e-9);
        // the triangle inequalities cap K4 at 4 as well
        assert!((r.objective - 4.0).abs() < 1e-9);
    }

    #[test]
    fn bound_dominates_exact_and_rows_hold_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        for trial in 0..60 {
            let n = rng.gen_range(3..=12);
            let mut edges = vec![];
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.5) {
                        edges.push(Edge { u, v, w: rng.gen_range(-1.0..2.0) });
                    }
                }
            }
            let g = MaxCutInstance::new(n, edges).unwrap();
            let r = solve_cycle_relaxation(&g).unwrap();
            let best = maxcut_brute_force(&g).unwrap();
            assert!(r.objective >= best.weight - 1e-9, "trial {trial}: {} < {}", r.objective, best.weight);
            assert!(separate_odd_cycles(&g, &r.values, 1).is_empty());
            assert!(r.values.iter().all(|&x| (0.0..=1.0).contains(&x)));
        }
    }

    #[test]
    fn components_are_solved_independently() {
        let g = unit(6, &[(0, 1), (1, 2), (0, 2), (3, 4)]);
        let r = solve_cycle_relaxation(&g).unwrap();
        assert!((r.objective - 3.0).abs() < 1e-9);
    }
}
