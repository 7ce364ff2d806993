use super::relaxation::solve_cycle_relaxation;
use super::MaxCutError;
use crate::problem::{CutSolution, MaxCutInstance};

/// Components up to this size are solved by enumeration.
pub const MAX_BRUTE_FORCE_VERTICES: usize = 22;
/// Hard cap for [`maxcut_exact`].
pub const MAX_EXACT_VERTICES: usize = 64;
/// Leaves of the branch-and-bound small enough to enumerate directly.
const LEAF_VERTICES: usize = 14;
const NODE_LIMIT: usize = 20_000;

/// Best cut of a connected graph by Gray-code enumeration with vertex 0 fixed on side `false`.
fn enumerate_component(g: &MaxCutInstance) -> (f64, Vec<bool>) {
    let n = g.n_vertices();
    let adj = g.adjacency();
    let w: Vec<f64> = g.edges().iter().map(|e| e.w).collect();
    let mut side = vec![false; n];
    let mut weight = 0.0;
    let mut best = (0.0, 0u64);
    let mut state = 0u64;
    for k in 1u64..1 << (n - 1) {
        let bit = k.trailing_zeros() as usize + 1;
        // flipping `bit` toggles every incident edge's cut status
        let mut delta = 0.0;
        for &(t, e) in &adj[bit] {
            delta += if side[t] == side[bit] { w[e] } else { -w[e] };
        }
        side[bit] = !side[bit];
        state ^= 1 << bit;
        weight += delta;
        if weight > best.0 + 1e-12 {
            best = (weight, state);
        }
    }
    let side: Vec<bool> = (0..n).map(|v| best.1 >> v & 1 == 1).collect();
    // recompute to drop accumulated rounding
    let exact = g.cut_weight(&side).expect("sized to the graph");
    (exact, side)
}

fn per_component(
    g: &MaxCutInstance,
    mut solve: impl FnMut(&MaxCutInstance) -> Result<(f64, Vec<bool>), MaxCutError>,
) -> Result<CutSolution, MaxCutError> {
    let mut side = vec![false; g.n_vertices()];
    for comp in g.components() {
        if comp.len() == 1 {
            continue;
        }
        let sub = g.induced(&comp);
        let (_, s) = solve(&sub)?;
        for (k, &v) in comp.iter().enumerate() {
            side[v] = s[k];
        }
    }
    Ok(CutSolution::new(g, side)?)
}

/// Maximum cut by enumeration of every component (each at most 22 vertices).
pub fn maxcut_brute_force(g: &MaxCutInstance) -> Result<CutSolution, MaxCutError> {
    per_component(g, |sub| {
        if sub.n_vertices() > MAX_BRUTE_FORCE_VERTICES {
            return Err(MaxCutError::TooLarge {
                size: sub.n_vertices(),
                limit: MAX_BRUTE_FORCE_VERTICES,
            });
        }
        Ok(enumerate_component(sub))
    })
}

/// Provably maximum cut: enumeration for small components, otherwise
/// branch-and-bound on signed edge contractions bounded by the cycle relaxation.
pub fn maxcut_exact(g: &MaxCutInstance) -> Result<CutSolution, MaxCutError> {
    if g.n_vertices() > MAX_EXACT_VERTICES {
        return Err(MaxCutError::TooLarge {
            size: g.n_vertices(),
            limit: MAX_EXACT_VERTICES,
        });
    }
    per_component(g, |sub| {
        if sub.n_vertices() <= MAX_BRUTE_FORCE_VERTICES {
            Ok(enumerate_component(sub))
        } else {
            branch_and_bound(sub)
        }
    })
}

struct Search {
    best: f64,
    best_side: Vec<bool>,
    nodes: usize,
}

/// `prov[o] = (current vertex, parity)`: original `o` sits on the side of
/// its current vertex XOR parity.
fn lift(prov: &[(usize, bool)], side: &[bool]) -> Vec<bool> {
    prov.iter().map(|&(c, p)| side[c] ^ p).collect()
}

fn local_search(g: &MaxCutInstance) -> Vec<bool> {
    let n = g.n_vertices();
    let adj = g.adjacency();
    let mut side = vec![false; n];
    loop {
        let mut improved = false;
        for v in 0..n {
            let gain: f64 = adj[v]
                .iter()
                .map(|&(t, e)| if side[t] == side[v] { g.edges()[e].w } else { -g.edges()[e].w })
                .sum();
            if gain > 1e-12 {
                side[v] = !side[v];
                improved = true;
            }
        }
        if !improved {
            return side;
        }
    }
}

/// Two-colours each component from integral edge values; `None` if inconsistent.
fn side_from_integral(g: &MaxCutInstance, x: &[f64]) -> Option<Vec<bool>> {
    let n = g.n_vertices();
    let adj = g.adjacency();
    let mut side: Vec<Option<bool>> = vec![None; n];
    for s in 0..n {
        if side[s].is_some() {
            continue;
        }
        side[s] = Some(false);
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            let sv = side[v]?;
            for &(t, e) in &adj[v] {
                let want = sv ^ (x[e] > 0.5);
                match side[t] {
                    None => {
                        side[t] = Some(want);
                        stack.push(t);
                    }
                    Some(st) if st != want => return None,
                    _ => {}
                }
            }
        }
    }
    side.into_iter().collect()
}

fn branch_and_bound(g: &MaxCutInstance) -> Result<(f64, Vec<bool>), MaxCutError> {
    let start = local_search(g);
    let mut search = Search {
        best: g.cut_weight(&start)?,
        best_side: start,
        nodes: 0,
    };
    let prov: Vec<(usize, bool)> = (0..g.n_vertices()).map(|v| (v, false)).collect();
    let root = g.clone().with_cut_offset(0.0);
    explore(g, root, prov, &mut search)?;
    Ok((search.best, search.best_side))
}

fn explore(orig: &MaxCutInstance, g: MaxCutInstance, prov: Vec<(usize, bool)>, s: &mut Search) -> Result<(), MaxCutError> {
    s.nodes += 1;
    if s.nodes > NODE_LIMIT {
        return Err(MaxCutError::NodeLimit(NODE_LIMIT));
    }
    let consider = |side: Vec<bool>, s: &mut Search| -> Result<(), MaxCutError> {
        let lifted = lift(&prov, &side);
        let w = orig.cut_weight(&lifted)?;
        if w > s.best + 1e-12 {
            s.best = w;
            s.best_side = lifted;
        }
        Ok(())
    };
    if g.n_vertices() <= LEAF_VERTICES {
        let cut = maxcut_brute_force(&g)?;
        return consider(cut.side, s);
    }
    let relax = solve_cycle_relaxation(&g)?;
    if relax.objective + g.cut_offset() <= s.best + 1e-9 {
        return Ok(());
    }
    if relax.is_integral(1e-6) {
        if let Some(side) = side_from_integral(&g, &relax.values) {
            return consider(side, s);
        }
    }
    let (k, xe) = relax
        .values
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - 0.5).abs().total_cmp(&(b.1 - 0.5).abs()).then(a.0.cmp(&b.0)))
        .map(|(k, &x)| (k, x))
        .expect("graph above leaf size has edges");
    let e = g.edges()[k];
    let order: [i8; 2] = if xe > 0.5 { [-1, 1] } else { [1, -1] };
    for sigma in order {
        // contract the larger index into the smaller
        let (u, v) = (e.v, e.u);
        let c = g.contract(u, v, sigma)?;
        let shift = |k: usize| if k > u { k - 1 } else { k };
        let child_prov: Vec<(usize, bool)> = prov
            .iter()
            .map(|&(cur, p)| if cur == u { (shift(v), p ^ (sigma == -1)) } else { (shift(cur), p) })
            .collect();
        explore(orig, c.graph, child_prov, s)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Edge;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit(n: usize, pairs: &[(usize, usize)]) -> MaxCutInstance {
        MaxCutInstance::new(n, pairs.iter().map(|&(u, v)| Edge { u, v, w: 1.0 }).collect()).unwrap()
    }

    fn naive(g: &MaxCutInstance) -> f64 {
        (0u64..1 << g.n_vertices()).map(|s| g.cut_weight_bits(s)).fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn single_edge() {
        let g = MaxCutInstance::new(2, vec![Edge { u: 0, v: 1, w: 5.0 }]).unwrap();
        assert_eq!(maxcut_exact(&g).unwrap().weight, 5.0);
    }

    #[test]
    fn five_cycle_cuts_four() {
        let g = unit(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]);
        let c = maxcut_exact(&g).unwrap();
        assert_eq!(c.weight, 4.0);
        assert_eq!(g.cut_weight(&c.side).unwrap(), 4.0);
    }

    #[test]
    fn enumeration_matches_naive_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for _ in 0..40 {
            let n = rng.gen_range(2..=12);
            let mut edges = vec![];
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.4) {
                        edges.push(Edge { u, v, w: rng.gen_range(-2.0..2.0) });
                    }
                }
            }
            let g = MaxCutInstance::new(n, edges).unwrap();
            let c = maxcut_brute_force(&g).unwrap();
            assert!((c.weight - naive(&g)).abs() < 1e-9);
        }
    }

    #[test]
    fn branch_and_bound_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(56);
        for _ in 0..6 {
            let n = rng.gen_range(16..=20);
            let mut edges = vec![];
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.3) {
                        edges.push(Edge { u, v, w: rng.gen_range(-1.0..2.0) });
                    }
                }
            }
            let g = MaxCutInstance::new(n, edges).unwrap();
            let bb = branch_and_bound(&g).unwrap();
            let bf = maxcut_brute_force(&g).unwrap();
            assert!((bb.0 - bf.weight).abs() < 1e-9, "{} vs {}", bb.0, bf.weight);
            assert!((g.cut_weight(&bb.1).unwrap() - bb.0).abs() < 1e-12);
        }
    }

    #[test]
    fn size_cap_is_enforced() {
        let g = MaxCutInstance::new(MAX_EXACT_VERTICES + 1, vec![Edge { u: 0, v: 1, w: 1.0 }]).unwrap();
        assert!(matches!(maxcut_exact(&g), Err(MaxCutError::TooLarge { .. })));
        let big = MaxCutInstance::new(23, (0..22).map(|v| Edge { u: v, v: v + 1, w: 1.0 }).collect()).unwrap();
        assert!(matches!(maxcut_brute_force(&big), Err(MaxCutError::TooLarge { .. })));
        // path on 23 vertices is bipartite: exact solver cuts every edge
        assert_eq!(maxcut_exact(&big).unwrap().weight, 22.0);
    }
}
