use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ProblemError, QuboProblem};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

impl Edge {
    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Weighted undirected graph for MaxCut.
///
/// Edges are stored canonically (`u < v`, sorted, unique, nonzero weight).
/// `offset` is the QUBO constant `C` (a QUBO-derived cut of total weight `M`
/// has QUBO value `-M/2 + C`); `cut_offset` is the cut weight accumulated by
/// contractions, so a cut of this graph with weight `m` represents a cut of
/// weight `m + cut_offset` of the graph it was shrunk from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMaxCut", into = "RawMaxCut")]
pub struct MaxCutInstance {
    n_vertices: usize,
    edges: Vec<Edge>,
    offset: f64,
    cut_offset: f64,
    root_vertex: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawMaxCut {
    n_vertices: usize,
    edges: Vec<Edge>,
    #[serde(default)]
    offset: f64,
    #[serde(default)]
    cut_offset: f64,
    #[serde(default)]
    root_vertex: Option<usize>,
}

impl TryFrom<RawMaxCut> for MaxCutInstance {
    type Error = ProblemError;
    fn try_from(r: RawMaxCut) -> Result<Self, ProblemError> {
        let mut g = MaxCutInstance::new(r.n_vertices, r.edges)?;
        g.offset = r.offset;
        g.cut_offset = r.cut_offset;
        if let Some(root) = r.root_vertex {
            g = g.with_root(root)?;
        }
        Ok(g)
    }
}

impl From<MaxCutInstance> for RawMaxCut {
    fn from(g: MaxCutInstance) -> Self {
        RawMaxCut {
            n_vertices: g.n_vertices,
            edges: g.edges,
            offset: g.offset,
            cut_offset: g.cut_offset,
            root_vertex: g.root_vertex,
        }
    }
}

/// Result of identifying two vertices; see [`MaxCutInstance::contract`].
#[derive(Clone, Debug, PartialEq)]
pub struct Contraction {
    pub graph: MaxCutInstance,
    /// Cut weight moved into `cut_offset` by this contraction.
    pub offset_delta: f64,
    /// Edges of the removed vertex `u`, in the old numbering.
    pub removed_u_edges: Vec<(usize, f64)>,
    /// Edges of `v` before the merge, in the old numbering.
    pub prior_v_edges: Vec<(usize, f64)>,
}

impl MaxCutInstance {
    /// Builds a graph; zero-weight edges are dropped, self-loops and
    /// duplicate pairs are rejected.
    pub fn new(n_vertices: usize, edges: Vec<Edge>) -> Result<Self, ProblemError> {
        if n_vertices == 0 {
            return Err(ProblemError::InvalidInstance("graph needs at least one vertex".into()));
        }
        let mut map = BTreeMap::new();
        for e in edges {
            let (u, v) = (e.u.min(e.v), e.u.max(e.v));
            if v >= n_vertices {
                return Err(ProblemError::VertexOutOfRange(v));
            }
            if u == v {
                return Err(ProblemError::InvalidInstance(format!("self-loop at {u}")));
            }
            if !e.w.is_finite() {
                return Err(ProblemError::InvalidInstance(format!("non-finite weight on ({u},{v})")));
            }
            if map.insert((u, v), e.w).is_some() {
                return Err(ProblemError::InvalidInstance(format!("duplicate edge ({u},{v})")));
            }
        }
        Ok(Self::from_map(n_vertices, map))
    }

    fn from_map(n_vertices: usize, map: BTreeMap<(usize, usize), f64>) -> Self {
        let edges = map
            .into_iter()
            .filter(|&(_, w)| w != 0.0)
            .map(|((u, v), w)| Edge { u, v, w })
            .collect();
        MaxCutInstance {
            n_vertices,
            edges,
            offset: 0.0,
            cut_offset: 0.0,
            root_vertex: None,
        }
    }

    pub fn with_root(mut self, root: usize) -> Result<Self, ProblemError> {
        if root >= self.n_vertices {
            return Err(ProblemError::VertexOutOfRange(root));
        }
        self.root_vertex = Some(root);
        Ok(self)
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn cut_offset(&self) -> f64 {
        self.cut_offset
    }

    pub fn root_vertex(&self) -> Option<usize> {
        self.root_vertex
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    /// Weight of the edge `{u, v}`, if present.
    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        let key = (u.min(v), u.max(v));
        self.edges
            .binary_search_by(|e| (e.u, e.v).cmp(&key))
            .ok()
            .map(|i| self.edges[i].w)
    }

    /// Neighbour lists as `(neighbour, edge index)`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n_vertices];
        for (k, e) in self.edges.iter().enumerate() {
            adj[e.u].push((e.v, k));
            adj[e.v].push((e.u, k));
        }
        adj
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut comp = vec![usize::MAX; self.n_vertices];
        let mut out = Vec::new();
        for s in 0..self.n_vertices {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut k = 0;
            while k < members.len() {
                let x = members[k];
                k += 1;
                for &(y, _) in &adj[x] {
                    if comp[y] == usize::MAX {
                        comp[y] = id;
                        members.push(y);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Induced subgraph on `vertices` (renumbered in the given order).
    pub fn induced(&self, vertices: &[usize]) -> MaxCutInstance {
        let mut pos = vec![usize::MAX; self.n_vertices];
        for (k, &v) in vertices.iter().enumerate() {
            pos[v] = k;
        }
        let map = self
            .edges
            .iter()
            .filter(|e| pos[e.u] != usize::MAX && pos[e.v] != usize::MAX)
            .map(|e| {
                let (a, b) = (pos[e.u], pos[e.v]);
                ((a.min(b), a.max(b)), e.w)
            })
            .collect();
        Self::from_map(vertices.len().max(1), map)
    }

    /// Plain cut weight `sum_{e in delta(W)} w_e` (no offsets).
    pub fn cut_weight(&self, side: &[bool]) -> Result<f64, ProblemError> {
        if side.len() != self.n_vertices {
            return Err(ProblemError::DimensionMismatch {
                expected: self.n_vertices,
                got: side.len(),
            });
        }
        Ok(self.edges.iter().filter(|e| side[e.u] != side[e.v]).map(|e| e.w).sum())
    }

    /// Cut weight of the bit string `s` (bit `k` = side of vertex `k`).
    #[inline]
    pub fn cut_weight_bits(&self, s: u64) -> f64 {
        self.edges
            .iter()
            .filter(|e| (s >> e.u ^ s >> e.v) & 1 == 1)
            .map(|e| e.w)
            .sum()
    }

    /// `f(s)` for every bit string of up to 30 vertices.
    pub fn cut_weight_table(&self) -> Result<Vec<f64>, ProblemError> {
        const LIMIT: usize = 30;
        if self.n_vertices > LIMIT {
            return Err(ProblemError::TooLarge {
                what: "cut table",
                size: self.n_vertices,
                limit: LIMIT,
            });
        }
        Ok((0..1u64 << self.n_vertices).map(|s| self.cut_weight_bits(s)).collect())
    }

    /// Identifies `u` with `v`; `sigma = +1` keeps them on the same side,
    /// `-1` on opposite sides.
    ///
    /// Vertex `u` disappears and indices above it shift down by one. For
    /// every neighbour `t` of `u`, `w'(t, v') = w(t, v) + sigma * w(t, u)`;
    /// when `sigma = -1` the weights of `u`'s edges move into `cut_offset`.
    pub fn contract(&self, u: usize, v: usize, sigma: i8) -> Result<Contraction, ProblemError> {
        if u >= self.n_vertices {
            return Err(ProblemError::VertexOutOfRange(u));
        }
        if v >= self.n_vertices {
            return Err(ProblemError::VertexOutOfRange(v));
        }
        if u == v {
            return Err(ProblemError::InvalidInstance("cannot contract a vertex with itself".into()));
        }
        if sigma != 1 && sigma != -1 {
            return Err(ProblemError::InvalidInstance(format!("sigma must be +-1, got {sigma}")));
        }
        let shift = |k: usize| if k > u { k - 1 } else { k };
        let vn = shift(v);
        let mut map: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        let mut removed_u_edges = Vec::new();
        let mut prior_v_edges = Vec::new();
        let mut delta = 0.0;
        let flip = sigma == -1;
        for e in &self.edges {
            let touches_u = e.u == u || e.v == u;
            if touches_u {
                let t = e.other(u);
                removed_u_edges.push((t, e.w));
                if flip {
                    delta += e.w;
                }
                if t == v {
                    continue;
                }
                let tn = shift(t);
                let key = (tn.min(vn), tn.max(vn));
                *map.entry(key).or_insert(0.0) += f64::from(sigma) * e.w;
            } else {
                if e.u == v || e.v == v {
                    prior_v_edges.push((e.other(v), e.w));
                }
                let (a, b) = (shift(e.u), shift(e.v));
                *map.entry((a.min(b), a.max(b))).or_insert(0.0) += e.w;
            }
        }
        let mut graph = Self::from_map(self.n_vertices - 1, map);
        graph.offset = self.offset;
        graph.cut_offset = self.cut_offset + delta;
        graph.root_vertex = self.root_vertex.filter(|&r| r != u && r != v).map(shift);
        Ok(Contraction {
            graph,
            offset_delta: delta,
            removed_u_edges,
            prior_v_edges,
        })
    }

    /// Undoes a contraction of `u` into `v` given the edges it recorded.
    pub fn uncontract(
        &self,
        u: usize,
        v: usize,
        removed_u_edges: &[(usize, f64)],
        prior_v_edges: &[(usize, f64)],
        offset_delta: f64,
        root_vertex: Option<usize>,
    ) -> Result<MaxCutInstance, ProblemError> {
        let n = self.n_vertices + 1;
        if u >= n || v >= n || u == v {
            return Err(ProblemError::InvalidInstance(format!("bad contraction pair ({u},{v})")));
        }
        let unshift = |k: usize| if k >= u { k + 1 } else { k };
        let mut map = BTreeMap::new();
        for e in &self.edges {
            let (a, b) = (unshift(e.u), unshift(e.v));
            if a == v || b == v {
                continue;
            }
            map.insert((a.min(b), a.max(b)), e.w);
        }
        for &(t, w) in prior_v_edges {
            map.insert((t.min(v), t.max(v)), w);
        }
        for &(t, w) in removed_u_edges {
            map.insert((t.min(u), t.max(u)), w);
        }
        let mut g = Self::from_map(n, map);
        g.offset = self.offset;
        g.cut_offset = self.cut_offset - offset_delta;
        g.root_vertex = root_vertex;
        Ok(g)
    }

    /// Sets `cut_offset` exactly (used when replaying stored artifacts).
    pub fn with_cut_offset(mut self, cut_offset: f64) -> Self {
        self.cut_offset = cut_offset;
        self
    }
}

/// A partition of the vertices; `side[v] = true` means `v` is in `W`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutSolution {
    pub side: Vec<bool>,
    pub weight: f64,
}

impl CutSolution {
    pub fn new(g: &MaxCutInstance, side: Vec<bool>) -> Result<Self, ProblemError> {
        let weight = g.cut_weight(&side)?;
        Ok(CutSolution { side, weight })
    }

    pub fn from_bits(g: &MaxCutInstance, s: u64) -> Self {
        let side = (0..g.n_vertices()).map(|k| s >> k & 1 == 1).collect();
        CutSolution {
            side,
            weight: g.cut_weight_bits(s),
        }
    }

    pub fn to_bits(&self) -> u64 {
        self.side
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .fold(0u64, |acc, (k, _)| acc | 1 << k)
    }

    pub fn flipped(&self) -> Self {
        CutSolution {
            side: self.side.iter().map(|b| !b).collect(),
            weight: self.weight,
        }
    }
}

/// QUBO on `n` variables to MaxCut on `n + 1` vertices with root `0`.
///
/// `w_ij = q_ij + q_ji` and `w_0i = sum_j (q_ij + q_ji)` where the sum
/// includes `j = i` (that is, `2 q_ii`); this reading is the one for which
/// `qubo_value = -M/2 + C` holds.
pub fn qubo_to_maxcut(q: &QuboProblem) -> MaxCutInstance {
    let n = q.n_vars();
    let mut map = BTreeMap::new();
    let mut diag = 0.0;
    let mut upper = 0.0;
    for i in 0..n {
        diag += q.coeff(i, i);
        let mut root_w = 0.0;
        for j in 0..n {
            root_w += q.coeff(i, j) + q.coeff(j, i);
        }
        map.insert((0, i + 1), root_w);
        for j in (i + 1)..n {
            let w = q.coeff(i, j) + q.coeff(j, i);
            upper += w;
            map.insert((i + 1, j + 1), w);
        }
    }
    let mut g = MaxCutInstance::from_map(n + 1, map);
    let total = g.total_weight();
    g.offset = 0.25 * (total + 2.0 * diag + upper);
    g.root_vertex = Some(0);
    g
}

/// `x_i = 1` iff vertex `i + 1` lies on the root's side.
pub fn cut_to_assignment(cut: &CutSolution, inst: &MaxCutInstance) -> Result<Vec<bool>, ProblemError> {
    let root = inst.root_vertex().ok_or(ProblemError::NotQuboDerived)?;
    if cut.side.len() != inst.n_vertices() {
        return Err(ProblemError::DimensionMismatch {
            expected: inst.n_vertices(),
            got: cut.side.len(),
        });
    }
    let r = cut.side[root];
    Ok((0..inst.n_vertices())
        .filter(|&v| v != root)
        .map(|v| cut.side[v] == r)
        .collect())
}
