use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use crate::linprog::{Constraint, Relation, FEAS_TOL};
use crate::problem::MaxCutInstance;

/// `sum_{e in odd} x_e - sum_{e in cycle \ odd} x_e <= |odd| - 1` for a simple cycle.
#[derive(Clone, Debug, PartialEq)]
pub struct OddCycleCut {
    /// Edge indices of the cycle, in walk order.
    pub cycle: Vec<usize>,
    /// The odd subset `T`, sorted.
    pub odd: Vec<usize>,
    pub violation: f64,
}

impl OddCycleCut {
    pub fn rhs(&self) -> f64 {
        self.odd.len() as f64 - 1.0
    }

    pub fn lhs(&self, x: &[f64]) -> f64 {
        self.cycle
            .iter()
            .map(|e| if self.odd.binary_search(e).is_ok() { x[*e] } else { -x[*e] })
            .sum()
    }

    /// The row over edge variables, with `map` sending edge index to LP column.
    pub fn to_constraint(&self, map: impl Fn(usize) -> usize) -> Constraint {
        let mut coeffs: Vec<(usize, f64)> = self
            .cycle
            .iter()
            .map(|&e| (map(e), if self.odd.binary_search(&e).is_ok() { 1.0 } else { -1.0 }))
            .collect();
        coeffs.sort_by_key(|&(j, _)| j);
        Constraint::new(coeffs, Relation::Le, self.rhs())
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Dist(f64);
impl Eq for Dist {}
impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Dist {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Closed walk from the two-layer shortest path: `(vertex, edge taken, in T)`.
fn shortest_odd_walk(g: &MaxCutInstance, adj: &[Vec<(usize, usize)>], x: &[f64], s: usize) -> Option<Vec<(usize, usize, bool)>> {
    let n = g.n_vertices();
    // node id = 2 * vertex + layer
    let mut dist = vec![f64::INFINITY; 2 * n];
    let mut prev: Vec<Option<(usize, usize, bool)>> = vec![None; 2 * n];
    let mut heap = BinaryHeap::new();
    dist[2 * s] = 0.0;
    heap.push(Reverse((Dist(0.0), 2 * s)));
    while let Some(Reverse((Dist(d), node))) = heap.pop() {
        if d > dist[node] {
            continue;
        }
        if node == 2 * s + 1 {
            break;
        }
        let (v, layer) = (node / 2, node % 2);
        for &(t, e) in &adj[v] {
            let xe = x[e].clamp(0.0, 1.0);
            for (odd, len) in [(false, xe), (true, 1.0 - xe)] {
                let next = 2 * t + (layer ^ usize::from(odd));
                let nd = d + len;
                if nd < dist[next] - 1e-15 {
                    dist[next] = nd;
                    prev[next] = Some((node, e, odd));
                    heap.push(Reverse((Dist(nd), next)));
                }
            }
        }
    }
    if dist[2 * s + 1] >= 1.0 - FEAS_TOL {
        return None;
    }
    let mut walk = Vec::new();
    let mut node = 2 * s + 1;
    while node != 2 * s {
        let (p, e, odd) = prev[node]?;
        walk.push((node / 2, e, odd));
        node = p;
    }
    walk.reverse();
    Some(walk)
}

/// Reduces a closed walk with odd `T`-parity to a simple cycle with odd parity
/// and no larger length. Walk entries are `(vertex reached, edge, in T)`;
/// the walk starts at the vertex reached by its last step.
fn simple_odd_cycle(mut walk: Vec<(usize, usize, bool)>) -> Option<Vec<(usize, bool)>> {
    loop {
        let k = walk.len();
        if k < 3 {
            return None;
        }
        // vertices visited: start (= last reached) then each reached vertex
        let start = walk[k - 1].0;
        let verts: Vec<usize> = std::iter::once(start).chain(walk.iter().map(|w| w.0)).collect();
        // find a repeated vertex inside the open sequence verts[0..k]
        let mut seen = std::collections::HashMap::new();
        let mut split = None;
        for (i, &v) in verts[..k].iter().enumerate() {
            if let Some(&j) = seen.get(&v) {
                split = Some((j, i));
                break;
            }
            seen.insert(v, i);
        }
        let Some((i, j)) = split else {
            return Some(walk.into_iter().map(|(_, e, odd)| (e, odd)).collect());
        };
        // steps i..j form a closed sub-walk (from verts[i] back to verts[j] = verts[i])
        let inner: Vec<_> = walk[i..j].to_vec();
        let parity = inner.iter().filter(|w| w.2).count() % 2;
        walk = if parity == 1 {
            inner
        } else {
            let mut outer = walk[..i].to_vec();
            outer.extend_from_slice(&walk[j..]);
            outer
        };
    }
}

fn cut_from_cycle(cycle: Vec<(usize, bool)>, x: &[f64]) -> Option<OddCycleCut> {
    let mut edges: Vec<usize> = cycle.iter().map(|c| c.0).collect();
    let distinct: BTreeSet<usize> = edges.iter().copied().collect();
    if distinct.len() != edges.len() {
        return None;
    }
    let mut odd: Vec<usize> = cycle.iter().filter(|c| c.1).map(|c| c.0).collect();
    odd.sort_unstable();
    let mut c = OddCycleCut {
        cycle: std::mem::take(&mut edges),
        odd,
        violation: 0.0,
    };
    c.violation = c.lhs(x) - c.rhs();
    (c.violation > FEAS_TOL).then_some(c)
}

/// Violated odd-cycle inequalities: the shortest odd closed walk from every
/// vertex, made simple, deduplicated, most violated first, at most `limit`.
pub fn separate_odd_cycles(g: &MaxCutInstance, x: &[f64], limit: usize) -> Vec<OddCycleCut> {
    assert_eq!(x.len(), g.n_edges(), "one value per edge");
    let adj = g.adjacency();
    let mut found: Vec<OddCycleCut> = Vec::new();
    let mut keys = BTreeSet::new();
    for s in 0..g.n_vertices() {
        let Some(walk) = shortest_odd_walk(g, &adj, x, s) else { continue };
        let Some(cycle) = simple_odd_cycle(walk) else { continue };
        let Some(cut) = cut_from_cycle(cycle, x) else { continue };
        let mut key_edges = cut.cycle.clone();
        key_edges.sort_unstable();
        if keys.insert((key_edges, cut.odd.clone())) {
            found.push(cut);
        }
    }
    found.sort_by(|a, b| b.violation.total_cmp(&a.violation).then_with(|| a.odd.cmp(&b.odd)));
    found.truncate(limit);
    found
}

/// Most violated odd-cycle inequality, or `None` if none is violated by more than the tolerance.
pub fn separate_odd_cycle(g: &MaxCutInstance, x: &[f64]) -> Option<OddCycleCut> {
    separate_odd_cycles(g, x, 1).into_iter().next()
}
