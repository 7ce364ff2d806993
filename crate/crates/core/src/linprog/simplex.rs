use super::{Constraint, LinearModel, LpError, LpSolution, LpStatus, Relation, Sense, FEAS_TOL};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
/// Consecutive degenerate pivots after which pricing falls back to Bland's rule.
const DEGENERATE_STREAK: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ColStatus {
    Basic(usize),
    AtLower,
    AtUpper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ColKind {
    Structural,
    Slack,
    Artificial,
}

/// How a model variable is represented by internal columns (all with lower bound 0).
#[derive(Clone, Copy, Debug)]
enum VarMap {
    /// `x = shift + col`
    Shifted { col: usize, shift: f64 },
    /// `x = shift - col`
    Mirrored { col: usize, shift: f64 },
    /// `x = plus - minus`
    Split { plus: usize, minus: usize },
}

/// Dense bounded-variable simplex tableau.
///
/// Internally every column lives in `[0, upper]` and the problem is a
/// minimization. The tableau rows hold `B^-1 A`; basic values are kept in
/// `beta` and nonbasic columns sit at one of their bounds.
#[derive(Clone, Debug)]
pub struct Simplex {
    sense: Sense,
    var_map: Vec<VarMap>,
    kind: Vec<ColKind>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    cost_const: f64,
    rows: Vec<Vec<f64>>,
    beta: Vec<f64>,
    basis: Vec<usize>,
    status: Vec<ColStatus>,
    reduced: Vec<f64>,
    bland: bool,
    degenerate_run: usize,
    iterations: usize,
    iteration_limit: usize,
    solved: Option<LpStatus>,
}

/// Solves the LP relaxation of `model` (integrality flags are ignored).
pub fn solve_lp(model: &LinearModel) -> Result<LpSolution, LpError> {
    let mut s = Simplex::new(model)?;
    s.solve()
}

impl Simplex {
    pub fn new(model: &LinearModel) -> Result<Self, LpError> {
        model.validate()?;
        let bounds: Vec<(f64, f64)> = model.variables.iter().map(|v| (v.lower, v.upper)).collect();
        Self::with_bounds(model, &bounds)
    }

    /// Like [`Simplex::new`] but with the variable bounds replaced.
    pub fn with_bounds(model: &LinearModel, bounds: &[(f64, f64)]) -> Result<Self, LpError> {
        let sign = match model.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut s = Simplex {
            sense: model.sense,
            var_map: Vec::with_capacity(bounds.len()),
            kind: Vec::new(),
            upper: Vec::new(),
            cost: Vec::new(),
            cost_const: 0.0,
            rows: Vec::new(),
            beta: Vec::new(),
            basis: Vec::new(),
            status: Vec::new(),
            reduced: Vec::new(),
            bland: false,
            degenerate_run: 0,
            iterations: 0,
            iteration_limit: 0,
            solved: None,
        };
        for (j, &(lo, hi)) in bounds.iter().enumerate() {
            if lo > hi || lo.is_nan() || hi.is_nan() {
                return Err(LpError::InvalidModel(format!("variable {j} has bounds [{lo}, {hi}]")));
            }
            let c = sign * model.objective[j];
            let map = if lo.is_finite() {
                let col = s.push_col(ColKind::Structural, hi - lo, c);
                s.cost_const += c * lo;
                VarMap::Shifted { col, shift: lo }
            } else if hi.is_finite() {
                let col = s.push_col(ColKind::Structural, f64::INFINITY, -c);
                s.cost_const += c * hi;
                VarMap::Mirrored { col, shift: hi }
            } else {
                let plus = s.push_col(ColKind::Structural, f64::INFINITY, c);
                let minus = s.push_col(ColKind::Structural, f64::INFINITY, -c);
                VarMap::Split { plus, minus }
            };
            s.var_map.push(map);
        }

        // rows: internal coefficients and shifted rhs, slack where available
        let mut pending: Vec<(Vec<(usize, f64)>, f64, Option<f64>)> = Vec::new();
        for c in &model.constraints {
            let (coeffs, rhs) = s.internal_row(c);
            let slack = match c.relation {
                Relation::Le => Some(1.0),
                Relation::Ge => Some(-1.0),
                Relation::Eq => None,
            };
            pending.push((coeffs, rhs, slack));
        }
        let m = pending.len();
        let mut slack_cols = vec![None; m];
        for (i, p) in pending.iter().enumerate() {
            if p.2.is_some() {
                slack_cols[i] = Some(s.push_col(ColKind::Slack, f64::INFINITY, 0.0));
            }
        }
        let mut art_for = vec![None; m];
        for (i, p) in pending.iter().enumerate() {
            let mut slack_sign = p.2.unwrap_or(0.0);
            if p.1 < 0.0 {
                slack_sign = -slack_sign;
            }
            if slack_sign <= 0.0 {
                art_for[i] = Some(s.push_col(ColKind::Artificial, f64::INFINITY, 0.0));
            }
        }
        let ncols = s.kind.len();
        for (i, (coeffs, rhs, slack)) in pending.into_iter().enumerate() {
            let mut row = vec![0.0; ncols];
            for (j, a) in coeffs {
                row[j] += a;
            }
            if let (Some(col), Some(sg)) = (slack_cols[i], slack) {
                row[col] = sg;
            }
            let mut rhs = rhs;
            if rhs < 0.0 {
                rhs = -rhs;
                row.iter_mut().for_each(|a| *a = -*a);
            }
            let basic = match art_for[i] {
                Some(a) => {
                    row[a] = 1.0;
                    a
                }
                None => slack_cols[i].expect("row without artificial has a +1 slack"),
            };
            s.status[basic] = ColStatus::Basic(i);
            s.rows.push(row);
            s.beta.push(rhs);
            s.basis.push(basic);
        }
        s.iteration_limit = 50_000 + 200 * (s.rows.len() + ncols);
        Ok(s)
    }

    fn push_col(&mut self, kind: ColKind, upper: f64, cost: f64) -> usize {
        self.kind.push(kind);
        self.upper.push(upper);
        self.cost.push(cost);
        self.status.push(ColStatus::AtLower);
        self.reduced.push(0.0);
        for row in &mut self.rows {
            row.push(0.0);
        }
        self.kind.len() - 1
    }

    /// Maps a model row onto internal columns; returns coefficients and shifted rhs.
    fn internal_row(&self, c: &Constraint) -> (Vec<(usize, f64)>, f64) {
        let mut rhs = c.rhs;
        let mut out = Vec::with_capacity(c.coeffs.len());
        for &(j, a) in &c.coeffs {
            match self.var_map[j] {
                VarMap::Shifted { col, shift } => {
                    rhs -= a * shift;
                    out.push((col, a));
                }
                VarMap::Mirrored { col, shift } => {
                    rhs -= a * shift;
                    out.push((col, -a));
                }
                VarMap::Split { plus, minus } => {
                    out.push((plus, a));
                    out.push((minus, -a));
                }
            }
        }
        (out, rhs)
    }

    fn ncols(&self) -> usize {
        self.kind.len()
    }

    fn col_value(&self, j: usize) -> f64 {
        match self.status[j] {
            ColStatus::Basic(r) => self.beta[r],
            ColStatus::AtLower => 0.0,
            ColStatus::AtUpper => self.upper[j],
        }
    }

    fn recompute_reduced(&mut self, cost: &[f64]) {
        let n = self.ncols();
        let mut d = cost.to_vec();
        for (r, row) in self.rows.iter().enumerate() {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                for (dj, a) in d.iter_mut().zip(row) {
                    *dj -= cb * a;
                }
            }
        }
        for r in 0..self.rows.len() {
            d[self.basis[r]] = 0.0;
        }
        debug_assert_eq!(d.len(), n);
        self.reduced = d;
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let piv = self.rows[r][j];
        let inv = 1.0 / piv;
        for a in self.rows[r].iter_mut() {
            *a *= inv;
        }
        self.rows[r][j] = 1.0;
        let prow = std::mem::take(&mut self.rows[r]);
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[j];
            if f != 0.0 {
                for (a, p) in row.iter_mut().zip(&prow) {
                    *a -= f * p;
                }
                row[j] = 0.0;
            }
        }
        let f = self.reduced[j];
        if f != 0.0 {
            for (d, p) in self.reduced.iter_mut().zip(&prow) {
                *d -= f * p;
            }
        }
        self.reduced[j] = 0.0;
        self.rows[r] = prow;
        let leaving = self.basis[r];
        self.basis[r] = j;
        self.status[j] = ColStatus::Basic(r);
        // caller fixes the leaving column's bound status
        self.status[leaving] = ColStatus::AtLower;
    }

    fn tick(&mut self, step: f64) -> Result<(), LpError> {
        self.iterations += 1;
        if self.iterations > self.iteration_limit {
            return Err(LpError::IterationLimit(self.iteration_limit));
        }
        if step <= 1e-12 {
            self.degenerate_run += 1;
            if self.degenerate_run >= DEGENERATE_STREAK {
                self.bland = true;
            }
        } else {
            self.degenerate_run = 0;
            self.bland = false;
        }
        Ok(())
    }

    /// Primal simplex from a primal feasible basis. Returns `false` on unboundedness.
    fn primal(&mut self, allow_artificial: bool) -> Result<bool, LpError> {
        loop {
            let mut enter: Option<(usize, f64)> = None;
            for j in 0..self.ncols() {
                if !allow_artificial && self.kind[j] == ColKind::Artificial {
                    continue;
                }
                let d = self.reduced[j];
                let score = match self.status[j] {
                    ColStatus::Basic(_) => continue,
                    ColStatus::AtLower if d < -COST_TOL && self.upper[j] > 0.0 => -d,
                    ColStatus::AtUpper if d > COST_TOL => d,
                    _ => continue,
                };
                if self.bland {
                    enter = Some((j, score));
                    break;
                }
                if enter.is_none_or(|(_, s)| score > s) {
                    enter = Some((j, score));
                }
            }
            let Some((j, _)) = enter else {
                return Ok(true);
            };
            let dir = if self.status[j] == ColStatus::AtUpper { -1.0 } else { 1.0 };

            let mut step = self.upper[j];
            let mut leave: Option<(usize, bool)> = None; // (row, leaves at upper)
            for (i, row) in self.rows.iter().enumerate() {
                let a = dir * row[j];
                let (limit, to_upper) = if a > PIVOT_TOL {
                    (self.beta[i] / a, false)
                } else if a < -PIVOT_TOL && self.upper[self.basis[i]].is_finite() {
                    ((self.upper[self.basis[i]] - self.beta[i]) / -a, true)
                } else {
                    continue;
                };
                let limit = limit.max(0.0);
                let better = match leave {
                    _ if limit < step - 1e-12 => true,
                    Some((l, _)) if limit <= step + 1e-12 => self.basis[i] < self.basis[l],
                    _ => false,
                };
                if better {
                    step = limit;
                    leave = Some((i, to_upper));
                }
            }
            if step == f64::INFINITY {
                return Ok(false);
            }
            self.tick(step)?;
            let delta = dir * step;
            for (i, row) in self.rows.iter().enumerate() {
                self.beta[i] -= delta * row[j];
            }
            match leave {
                None => {
                    self.status[j] = if dir > 0.0 { ColStatus::AtUpper } else { ColStatus::AtLower };
                }
                Some((r, to_upper)) => {
                    let entering_value = if dir > 0.0 { step } else { self.upper[j] - step };
                    let leaving = self.basis[r];
                    self.pivot(r, j);
                    self.beta[r] = entering_value;
                    self.status[leaving] = if to_upper { ColStatus::AtUpper } else { ColStatus::AtLower };
                }
            }
        }
    }

    /// Dual simplex from a dual feasible basis. Returns `false` on primal infeasibility.
    fn dual(&mut self) -> Result<bool, LpError> {
        loop {
            let mut leave: Option<(usize, f64, bool)> = None; // (row, infeasibility, above upper)
            for i in 0..self.rows.len() {
                let b = self.beta[i];
                let u = self.upper[self.basis[i]];
                let (inf, above) = if b < -FEAS_TOL * 0.1 {
                    (-b, false)
                } else if b > u + FEAS_TOL * 0.1 {
                    (b - u, true)
                } else {
                    continue;
                };
                if self.bland {
                    if leave.is_none_or(|(l, _, _)| self.basis[i] < self.basis[l]) {
                        leave = Some((i, inf, above));
                    }
                } else if leave.is_none_or(|(_, s, _)| inf > s) {
                    leave = Some((i, inf, above));
                }
            }
            let Some((r, _, above)) = leave else {
                return Ok(true);
            };
            let mut enter: Option<(usize, f64)> = None;
            for j in 0..self.ncols() {
                if self.kind[j] == ColKind::Artificial {
                    continue;
                }
                let a = self.rows[r][j];
                let eligible = match self.status[j] {
                    ColStatus::Basic(_) => false,
                    ColStatus::AtLower => self.upper[j] > 0.0 && if above { a > PIVOT_TOL } else { a < -PIVOT_TOL },
                    ColStatus::AtUpper => if above { a < -PIVOT_TOL } else { a > PIVOT_TOL },
                };
                if !eligible {
                    continue;
                }
                let ratio = self.reduced[j].abs() / a.abs();
                if enter.is_none_or(|(_, best)| ratio < best - 1e-12) {
                    enter = Some((j, ratio));
                }
            }
            let Some((j, _)) = enter else {
                return Ok(false);
            };
            let target = if above { self.upper[self.basis[r]] } else { 0.0 };
            let delta = (self.beta[r] - target) / self.rows[r][j];
            self.tick(delta.abs())?;
            let entering_value = self.col_value(j) + delta;
            for (i, row) in self.rows.iter().enumerate() {
                self.beta[i] -= delta * row[j];
            }
            let leaving = self.basis[r];
            self.pivot(r, j);
            self.beta[r] = entering_value;
            self.status[leaving] = if above { ColStatus::AtUpper } else { ColStatus::AtLower };
        }
    }

    fn has_artificials(&self) -> bool {
        self.kind.contains(&ColKind::Artificial)
    }

    fn phase_one(&mut self) -> Result<bool, LpError> {
        let cost: Vec<f64> = self
            .kind
            .iter()
            .map(|&k| if k == ColKind::Artificial { 1.0 } else { 0.0 })
            .collect();
        self.recompute_reduced(&cost);
        self.primal(true)?;
        let infeasibility: f64 = (0..self.rows.len())
            .filter(|&r| self.kind[self.basis[r]] == ColKind::Artificial)
            .map(|r| self.beta[r])
            .sum();
        if infeasibility > FEAS_TOL {
            return Ok(false);
        }
        // drive remaining artificials out of the basis, dropping redundant rows
        let mut r = 0;
        while r < self.rows.len() {
            if self.kind[self.basis[r]] != ColKind::Artificial {
                r += 1;
                continue;
            }
            let pick = (0..self.ncols())
                .filter(|&j| self.kind[j] != ColKind::Artificial && !matches!(self.status[j], ColStatus::Basic(_)))
                .filter(|&j| self.rows[r][j].abs() > 1e-7)
                .max_by(|&a, &b| self.rows[r][a].abs().total_cmp(&self.rows[r][b].abs()).then(b.cmp(&a)));
            match pick {
                Some(j) => {
                    let value = self.col_value(j);
                    let leaving = self.basis[r];
                    let delta = self.beta[r] / self.rows[r][j];
                    for (i, row) in self.rows.iter().enumerate() {
                        self.beta[i] -= delta * row[j];
                    }
                    self.pivot(r, j);
                    self.beta[r] = value + delta;
                    self.status[leaving] = ColStatus::AtLower;
                    r += 1;
                }
                None => {
                    self.rows.remove(r);
                    self.beta.remove(r);
                    self.basis.remove(r);
                    for (k, &b) in self.basis.iter().enumerate() {
                        self.status[b] = ColStatus::Basic(k);
                    }
                }
            }
        }
        // artificial columns are the trailing block
        let keep = self.kind.iter().position(|&k| k == ColKind::Artificial).unwrap_or(self.ncols());
        debug_assert!(self.kind[keep..].iter().all(|&k| k == ColKind::Artificial));
        self.kind.truncate(keep);
        self.upper.truncate(keep);
        self.cost.truncate(keep);
        self.status.truncate(keep);
        self.reduced.truncate(keep);
        for row in &mut self.rows {
            row.truncate(keep);
        }
        Ok(true)
    }

    /// Solves from the current basis (two-phase when artificials are present).
    pub fn solve(&mut self) -> Result<LpSolution, LpError> {
        if self.has_artificials() && !self.phase_one()? {
            self.solved = Some(LpStatus::Infeasible);
            return Ok(LpSolution::infeasible());
        }
        let cost = self.cost.clone();
        self.recompute_reduced(&cost);
        if !self.primal(false)? {
            self.solved = Some(LpStatus::Unbounded);
            return Ok(LpSolution::unbounded());
        }
        self.solved = Some(LpStatus::Optimal);
        Ok(self.solution())
    }

    /// Appends rows to a solved tableau and re-optimizes with the dual simplex.
    pub fn add_rows_and_resolve(&mut self, rows: &[Constraint]) -> Result<LpSolution, LpError> {
        if self.solved != Some(LpStatus::Optimal) {
            return Err(LpError::InvalidModel("rows can only be added to an optimal tableau".into()));
        }
        for c in rows {
            self.add_row(c);
        }
        self.iteration_limit = self.iterations + 50_000 + 200 * (self.rows.len() + self.ncols());
        if !self.dual()? {
            self.solved = Some(LpStatus::Infeasible);
            return Ok(LpSolution::infeasible());
        }
        // clean up any reduced cost drift left by the dual pass
        if !self.primal(false)? {
            self.solved = Some(LpStatus::Unbounded);
            return Ok(LpSolution::unbounded());
        }
        Ok(self.solution())
    }

    fn add_row(&mut self, c: &Constraint) {
        let (coeffs, rhs) = self.internal_row(c);
        let (sign, slack_upper) = match c.relation {
            Relation::Le => (1.0, f64::INFINITY),
            Relation::Ge => (-1.0, f64::INFINITY),
            Relation::Eq => (1.0, 0.0),
        };
        let slack = self.push_col(ColKind::Slack, slack_upper, 0.0);
        let n = self.ncols();
        let mut row = vec![0.0; n];
        for &(j, a) in &coeffs {
            row[j] += sign * a;
        }
        let rhs = sign * rhs;
        let activity: f64 = (0..n).filter(|&j| row[j] != 0.0).map(|j| row[j] * self.col_value(j)).sum();
        row[slack] = 1.0;
        for (i, brow) in self.rows.iter().enumerate() {
            let k = self.basis[i];
            let f = row[k];
            if f != 0.0 {
                for (a, b) in row.iter_mut().zip(brow) {
                    *a -= f * b;
                }
                row[k] = 0.0;
            }
        }
        let r = self.rows.len();
        self.rows.push(row);
        self.beta.push(rhs - activity);
        self.basis.push(slack);
        self.status[slack] = ColStatus::Basic(r);
        self.reduced[slack] = 0.0;
        self.solved = Some(LpStatus::Optimal);
    }

    /// Current primal solution in model space.
    pub fn solution(&self) -> LpSolution {
        let values: Vec<f64> = self
            .var_map
            .iter()
            .map(|m| match *m {
                VarMap::Shifted { col, shift } => shift + self.col_value(col),
                VarMap::Mirrored { col, shift } => shift - self.col_value(col),
                VarMap::Split { plus, minus } => self.col_value(plus) - self.col_value(minus),
            })
            .collect();
        let internal: f64 = (0..self.ncols()).map(|j| self.cost[j] * self.col_value(j)).sum::<f64>() + self.cost_const;
        let objective = match self.sense {
            Sense::Minimize => internal,
            Sense::Maximize => -internal,
        };
        LpSolution {
            status: LpStatus::Optimal,
            values,
            objective,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }
}

#[cfg(test)]
mod tests {
    use super::super::{LinearModel, Relation, Sense};
    use super::*;
    use itertools::Itertools;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_bounded_variable() {
        let mut m = LinearModel::new(Sense::Maximize);
        m.add_var("x", 0.0, 1.0, false, 1.0);
        let s = solve_lp(&m).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.values[0] - 1.0).abs() < 1e-12);
        assert!((s.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_face_has_unique_objective() {
        let mut m = LinearModel::new(Sense::Maximize);
        let x = m.add_var("x", 0.0, f64::INFINITY, false, 1.0);
        let y = m.add_var("y", 0.0, f64::INFINITY, false, 1.0);
        m.add_constraint(vec![(x, 1.0), (y, 1.0)], Relation::Le, 1.0);
        let s = solve_lp(&m).unwrap();
        assert!((s.objective - 1.0).abs() < 1e-12);
        assert!(m.max_violation(&s.values) < 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut m = LinearModel::new(Sense::Minimize);
        let x = m.add_var("x", 0.0, 1.0, false, 1.0);
        m.add_constraint(vec![(x, 1.0)], Relation::Ge, 2.0);
        assert_eq!(solve_lp(&m).unwrap().status, LpStatus::Infeasible);

        let mut m = LinearModel::new(Sense::Maximize);
        let x = m.add_var("x", 0.0, f64::INFINITY, false, 1.0);
        let y = m.add_var("y", 0.0, f64::INFINITY, false, 0.0);
        m.add_constraint(vec![(x, 1.0), (y, -1.0)], Relation::Le, 1.0);
        assert_eq!(solve_lp(&m).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn equalities_free_and_negative_variables() {
        // min x + 2y - z  s.t. x + y = 3, y - z >= -1, z <= 2, x free, y in [-5, 5]
        let mut m = LinearModel::new(Sense::Minimize);
        let x = m.add_var("x", f64::NEG_INFINITY, f64::INFINITY, false, 1.0);
        let y = m.add_var("y", -5.0, 5.0, false, 2.0);
        let z = m.add_var("z", f64::NEG_INFINITY, 2.0, false, -1.0);
        m.add_constraint(vec![(x, 1.0), (y, 1.0)], Relation::Eq, 3.0);
        m.add_constraint(vec![(y, 1.0), (z, -1.0)], Relation::Ge, -1.0);
        m.add_constraint(vec![(x, 1.0)], Relation::Le, 10.0);
        let s = solve_lp(&m).unwrap();
        // substituting x = 3 - y leaves 3 + y - z with y - z >= -1
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 2.0).abs() < 1e-9);
        assert!(m.max_violation(&s.values) < 1e-9);
    }

    #[test]
    fn adding_rows_matches_solving_from_scratch() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..30 {
            let n = 8;
            let mut m = LinearModel::new(Sense::Maximize);
            for j in 0..n {
                m.add_var(format!("x{j}"), 0.0, 1.0, false, rng.gen_range(-1.0..2.0));
            }
            let mut s = Simplex::new(&m).unwrap();
            s.solve().unwrap();
            let mut extra = vec![];
            for _ in 0..6 {
                let coeffs: Vec<(usize, f64)> = (0..n).map(|j| (j, rng.gen_range(-1.0..1.0))).collect();
                let rel = if rng.gen_bool(0.8) { Relation::Le } else { Relation::Ge };
                extra.push(Constraint::new(coeffs, rel, rng.gen_range(0.0..1.0) * if rel == Relation::Ge { -1.0 } else { 1.0 }));
            }
            let warm = s.add_rows_and_resolve(&extra[..3]).unwrap();
            let warm = if warm.is_optimal() { s.add_rows_and_resolve(&extra[3..]).unwrap() } else { warm };
            let mut full = m.clone();
            full.constraints.extend(extra);
            let cold = solve_lp(&full).unwrap();
            assert_eq!(warm.status, cold.status);
            if cold.is_optimal() {
                assert!((warm.objective - cold.objective).abs() < 1e-9);
                assert!(full.max_violation(&warm.values) < 1e-7);
            }
        }
    }

    /// Enumerates every vertex of `{Ax <= b, 0 <= x <= 1}`: pick the tight rows,
    /// the same number of free columns, and put every other column at a bound.
    fn vertex_enumeration_optimum(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Option<f64> {
        let (m, n) = (a.len(), c.len());
        let mut best: Option<f64> = None;
        for rows_mask in 0u32..(1 << m) {
            let tight: Vec<usize> = (0..m).filter(|i| rows_mask >> i & 1 == 1).collect();
            let k = tight.len();
            if k > n {
                continue;
            }
            for free in (0..n).combinations(k) {
                let fixed: Vec<usize> = (0..n).filter(|j| !free.contains(j)).collect();
                for bmask in 0u32..(1 << fixed.len()) {
                    let mut x = vec![0.0; n];
                    for (t, &j) in fixed.iter().enumerate() {
                        x[j] = f64::from(bmask >> t & 1);
                    }
                    // solve the k x k system for the free columns
                    let mut mat: Vec<Vec<f64>> = tight
                        .iter()
                        .map(|&i| {
                            let rhs = b[i] - fixed.iter().map(|&j| a[i][j] * x[j]).sum::<f64>();
                            let mut r: Vec<f64> = free.iter().map(|&j| a[i][j]).collect();
                            r.push(rhs);
                            r
                        })
                        .collect();
                    let Some(sol) = gauss(&mut mat) else { continue };
                    for (t, &j) in free.iter().enumerate() {
                        x[j] = sol[t];
                    }
                    let feasible = x.iter().all(|&v| (-1e-9..=1.0 + 1e-9).contains(&v))
                        && (0..m).all(|i| a[i].iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() <= b[i] + 1e-9);
                    if feasible {
                        let obj: f64 = c.iter().zip(&x).map(|(p, q)| p * q).sum();
                        best = Some(best.map_or(obj, |v: f64| v.max(obj)));
                    }
                }
            }
        }
        best
    }

    fn gauss(mat: &mut [Vec<f64>]) -> Option<Vec<f64>> {
        let k = mat.len();
        for col in 0..k {
            let p = (col..k).max_by(|&x, &y| mat[x][col].abs().total_cmp(&mat[y][col].abs()))?;
            if mat[p][col].abs() < 1e-10 {
                return None;
            }
            mat.swap(col, p);
            for r in 0..k {
                if r != col {
                    let f = mat[r][col] / mat[col][col];
                    for c in col..=k {
                        mat[r][c] -= f * mat[col][c];
                    }
                }
            }
        }
        Some((0..k).map(|r| mat[r][k] / mat[r][r]).collect())
    }

    #[test]
    fn random_ten_by_ten_matches_vertex_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..2 {
            let (m, n) = (10, 10);
            let a: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            let b: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..2.0)).collect();
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut model = LinearModel::new(Sense::Maximize);
            for (j, &cj) in c.iter().enumerate() {
                model.add_var(format!("x{j}"), 0.0, 1.0, false, cj);
            }
            for i in 0..m {
                model.add_constraint(a[i].iter().copied().enumerate().collect(), Relation::Le, b[i]);
            }
            let lp = solve_lp(&model).unwrap();
            let oracle = vertex_enumeration_optimum(&a, &b, &c).unwrap();
            assert!((lp.objective - oracle).abs() < 1e-7, "{} vs {}", lp.objective, oracle);
            assert!(model.max_violation(&lp.values) < 1e-7);
        }
    }

    #[test]
    fn identical_models_give_identical_bits() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut m = LinearModel::new(Sense::Maximize);
        for j in 0..12 {
            m.add_var(format!("x{j}"), 0.0, 1.0, false, rng.gen_range(-1.0..1.0));
        }
        for _ in 0..9 {
            m.add_constraint((0..12).map(|j| (j, rng.gen_range(-1.0..1.0))).collect(), Relation::Le, 0.5);
        }
        let a = solve_lp(&m).unwrap();
        let b = solve_lp(&m).unwrap();
        assert_eq!(a.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), b.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }
}
