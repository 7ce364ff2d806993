use serde::{Deserialize, Serialize};

use super::{ProblemError, Tour, TspInstance};

/// `min sum_ij q_ij x_i x_j` over binary `x`. The matrix need not be symmetric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuboProblem {
    n_vars: usize,
    /// Row-major `n_vars x n_vars`.
    coeffs: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    encoding: Option<TspEncoding>,
}

/// Variable `index` means "city `city` is visited at time step `time`".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TspVariable {
    pub index: usize,
    pub city: usize,
    pub time: usize,
}

/// Bookkeeping for a TSP-derived QUBO.
///
/// For a feasible assignment, `qubo_value = penalty_b * tour_length + constant`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TspEncoding {
    pub n_cities: usize,
    pub penalty_a: f64,
    pub penalty_b: f64,
    pub constant: f64,
    pub variables: Vec<TspVariable>,
}

impl TspEncoding {
    pub fn tour_length_of(&self, qubo_value: f64) -> f64 {
        (qubo_value - self.constant) / self.penalty_b
    }

    pub fn qubo_value_of(&self, tour_length: f64) -> f64 {
        self.penalty_b * tour_length + self.constant
    }

    /// Index of `x_{city,time}`, both in `1..N`.
    pub fn index(&self, city: usize, time: usize) -> usize {
        (city - 1) * (self.n_cities - 1) + (time - 1)
    }
}

impl QuboProblem {
    pub fn new(n_vars: usize, coeffs: Vec<f64>) -> Result<Self, ProblemError> {
        if n_vars == 0 {
            return Err(ProblemError::InvalidInstance("QUBO needs at least one variable".into()));
        }
        if coeffs.len() != n_vars * n_vars {
            return Err(ProblemError::DimensionMismatch {
                expected: n_vars * n_vars,
                got: coeffs.len(),
            });
        }
        if let Some(bad) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(ProblemError::InvalidInstance(format!("non-finite coefficient {bad}")));
        }
        Ok(QuboProblem {
            n_vars,
            coeffs,
            encoding: None,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    #[inline]
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        self.coeffs[i * self.n_vars + j]
    }

    pub fn encoding(&self) -> Option<&TspEncoding> {
        self.encoding.as_ref()
    }

    pub fn value(&self, x: &[bool]) -> Result<f64, ProblemError> {
        if x.len() != self.n_vars {
            return Err(ProblemError::DimensionMismatch {
                expected: self.n_vars,
                got: x.len(),
            });
        }
        let n = self.n_vars;
        let mut total = 0.0;
        for i in (0..n).filter(|&i| x[i]) {
            let row = &self.coeffs[i * n..(i + 1) * n];
            total += (0..n).filter(|&j| x[j]).map(|j| row[j]).sum::<f64>();
        }
        Ok(total)
    }
}

/// One-hot TSP model with city 0 pinned at time 0.
///
/// Variables are `x_{v,t}` for `v, t in 1..N`. Time wraps modulo `N`, so the
/// transitions `0 -> 1` and `N-1 -> 0` touch the pinned city and become
/// linear terms folded into the diagonal.
pub fn tsp_to_qubo(tsp: &TspInstance, penalty_a: f64, penalty_b: f64) -> Result<QuboProblem, ProblemError> {
    let n_c = tsp.n_cities();
    let required = n_c as f64 * tsp.max_distance();
    if !(penalty_a > 0.0 && penalty_b > 0.0) {
        return Err(ProblemError::InvalidInstance("penalties must be positive".into()));
    }
    let ratio = penalty_a / penalty_b;
    if !(ratio > required) {
        return Err(ProblemError::PenaltyTooSmall { ratio, required });
    }
    let m = n_c - 1;
    let n = m * m;
    let idx = |city: usize, time: usize| (city - 1) * m + (time - 1);
    let mut q = vec![0.0; n * n];

    // A (1 - sum x)^2 = A (1 - sum x + 2 sum_{pairs} x x), constant handled below
    for v in 1..n_c {
        for t in 1..n_c {
            q[idx(v, t) * n + idx(v, t)] -= 2.0 * penalty_a; // once from the row, once from the column
        }
    }
    for v in 1..n_c {
        for t in 1..n_c {
            for t2 in (t + 1)..n_c {
                q[idx(v, t) * n + idx(v, t2)] += penalty_a;
                q[idx(v, t2) * n + idx(v, t)] += penalty_a;
            }
        }
    }
    for t in 1..n_c {
        for v in 1..n_c {
            for v2 in (v + 1)..n_c {
                q[idx(v, t) * n + idx(v2, t)] += penalty_a;
                q[idx(v2, t) * n + idx(v, t)] += penalty_a;
            }
        }
    }

    // B sum_{u != v} d_uv sum_t x_{u,t} x_{v,t+1}
    for v in 1..n_c {
        q[idx(v, 1) * n + idx(v, 1)] += penalty_b * tsp.distance(0, v);
        q[idx(v, m) * n + idx(v, m)] += penalty_b * tsp.distance(v, 0);
    }
    for t in 1..m {
        for u in 1..n_c {
            for v in (1..n_c).filter(|&v| v != u) {
                q[idx(u, t) * n + idx(v, t + 1)] += penalty_b * tsp.distance(u, v);
            }
        }
    }

    let variables = (1..n_c)
        .flat_map(|city| (1..n_c).map(move |time| (city, time)))
        .map(|(city, time)| TspVariable {
            index: idx(city, time),
            city,
            time,
        })
        .collect();
    let mut qubo = QuboProblem::new(n, q)?;
    qubo.encoding = Some(TspEncoding {
        n_cities: n_c,
        penalty_a,
        penalty_b,
        constant: -2.0 * m as f64 * penalty_a,
        variables,
    });
    Ok(qubo)
}

/// A row (city) or column (time step) of the assignment matrix that is not one-hot.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OneHotViolation {
    City { city: usize, count: usize },
    Time { time: usize, count: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum DecodedTour {
    Tour(Tour),
    Infeasible(Vec<OneHotViolation>),
}

impl DecodedTour {
    pub fn tour(&self) -> Option<&Tour> {
        match self {
            DecodedTour::Tour(t) => Some(t),
            DecodedTour::Infeasible(_) => None,
        }
    }
}

/// Reads a tour out of a one-hot assignment of the `(N-1)^2` variables.
pub fn decode_tour(x: &[bool], tsp: &TspInstance, encoding: &TspEncoding) -> Result<DecodedTour, ProblemError> {
    let n_c = tsp.n_cities();
    if encoding.n_cities != n_c {
        return Err(ProblemError::DimensionMismatch {
            expected: n_c,
            got: encoding.n_cities,
        });
    }
    let m = n_c - 1;
    if x.len() != m * m {
        return Err(ProblemError::DimensionMismatch {
            expected: m * m,
            got: x.len(),
        });
    }
    let mut violations = Vec::new();
    for city in 1..n_c {
        let count = (1..n_c).filter(|&t| x[encoding.index(city, t)]).count();
        if count != 1 {
            violations.push(OneHotViolation::City { city, count });
        }
    }
    let mut order = vec![0; n_c];
    for time in 1..n_c {
        let cities: Vec<usize> = (1..n_c).filter(|&v| x[encoding.index(v, time)]).collect();
        if cities.len() == 1 {
            order[time] = cities[0];
        } else {
            violations.push(OneHotViolation::Time {
                time,
                count: cities.len(),
            });
        }
    }
    if !violations.is_empty() {
        return Ok(DecodedTour::Infeasible(violations));
    }
    Ok(DecodedTour::Tour(Tour::new(tsp, order)?))
}

#[cfg(test)]
mod tests {
    use super::super::{generate_euclidean_tsp, tsp_brute_force};
    use super::*;
    use itertools::Itertools;

    fn bits(v: u64, n: usize) -> Vec<bool> {
        (0..n).map(|k| v >> k & 1 == 1).collect()
    }

    fn default_qubo(tsp: &TspInstance) -> QuboProblem {
        let (a, b) = super::super::default_penalties(tsp);
        tsp_to_qubo(tsp, a, b).unwrap()
    }

    fn assignment_for(order: &[usize], enc: &TspEncoding) -> Vec<bool> {
        let m = enc.n_cities - 1;
        let mut x = vec![false; m * m];
        for (time, &city) in order.iter().enumerate().skip(1) {
            x[enc.index(city, time)] = true;
        }
        x
    }

    #[test]
    fn seven_cities_give_36_variables() {
        let t = generate_euclidean_tsp(7, 1, 1.0).unwrap();
        assert_eq!(default_qubo(&t).n_vars(), 36);
    }

    #[test]
    fn penalty_precondition_enforced() {
        let t = generate_euclidean_tsp(4, 1, 1.0).unwrap();
        let r = t.n_cities() as f64 * t.max_distance();
        assert!(matches!(tsp_to_qubo(&t, r, 1.0), Err(ProblemError::PenaltyTooSmall { .. })));
        assert!(tsp_to_qubo(&t, r + 1e-6, 1.0).is_ok());
    }

    #[test]
    fn triangle_minimizers_are_both_orientations() {
        let t = generate_euclidean_tsp(3, 9, 1.0).unwrap();
        let q = default_qubo(&t);
        let enc = q.encoding().unwrap();
        let values: Vec<f64> = (0..16u64).map(|v| q.value(&bits(v, 4)).unwrap()).collect();
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let minimizers: Vec<u64> = (0..16u64).filter(|&v| (values[v as usize] - min).abs() < 1e-9).collect();
        assert_eq!(minimizers.len(), 2);
        let tours: Vec<Tour> = minimizers
            .iter()
            .map(|&v| decode_tour(&bits(v, 4), &t, enc).unwrap().tour().cloned().unwrap())
            .collect();
        assert_ne!(tours[0].order, tours[1].order);
        assert!(tours[0].same_cycle(&tours[1]));
    }

    #[test]
    fn five_city_exhaustive_enumeration_matches_brute_force() {
        let t = generate_euclidean_tsp(5, 42, 1.0).unwrap();
        let q = default_qubo(&t);
        let enc = q.encoding().unwrap();
        let best = tsp_brute_force(&t).unwrap();
        let mut feasible_min = f64::INFINITY;
        let mut infeasible_min = f64::INFINITY;
        let mut argmin = 0u64;
        let mut global_min = f64::INFINITY;
        for v in 0..(1u64 << 16) {
            let x = bits(v, 16);
            let val = q.value(&x).unwrap();
            if val < global_min {
                global_min = val;
                argmin = v;
            }
            match decode_tour(&x, &t, enc).unwrap() {
                DecodedTour::Tour(tour) => {
                    feasible_min = feasible_min.min(val);
                    assert!((enc.tour_length_of(val) - tour.length).abs() < 1e-9);
                }
                DecodedTour::Infeasible(_) => infeasible_min = infeasible_min.min(val),
            }
        }
        assert!((feasible_min - enc.qubo_value_of(best.length)).abs() < 1e-9);
        assert!(infeasible_min > feasible_min);
        let decoded = decode_tour(&bits(argmin, 16), &t, enc).unwrap();
        let tour = decoded.tour().expect("global minimum is feasible");
        assert!((tour.length - best.length).abs() < 1e-9);
    }

    #[test]
    fn penalty_dominance_up_to_five_cities() {
        for (n, seed) in [(3, 1), (4, 2), (4, 3), (5, 4)] {
            let t = generate_euclidean_tsp(n, seed, 1.0).unwrap();
            let q = default_qubo(&t);
            let enc = q.encoding().unwrap();
            let nv = q.n_vars();
            let (mut feas_max, mut infeas_min) = (f64::NEG_INFINITY, f64::INFINITY);
            for v in 0..(1u64 << nv) {
                let x = bits(v, nv);
                let val = q.value(&x).unwrap();
                match decode_tour(&x, &t, enc).unwrap() {
                    DecodedTour::Tour(_) => feas_max = feas_max.max(val),
                    DecodedTour::Infeasible(_) => infeas_min = infeas_min.min(val),
                }
            }
            assert!(infeas_min > feas_max, "n={n}: {infeas_min} <= {feas_max}");
        }
    }

    #[test]
    fn permutation_matrices_round_trip() {
        let t = generate_euclidean_tsp(5, 8, 1.0).unwrap();
        let q = default_qubo(&t);
        let enc = q.encoding().unwrap();
        for perm in (1..5).permutations(4) {
            let order: Vec<usize> = std::iter::once(0).chain(perm).collect();
            let x = assignment_for(&order, enc);
            let tour = decode_tour(&x, &t, enc).unwrap().tour().cloned().unwrap();
            assert_eq!(tour.order, order);
            let len = t.tour_length(&order).unwrap();
            assert!((enc.tour_length_of(q.value(&x).unwrap()) - len).abs() < 1e-9);
        }
    }

    #[test]
    fn identity_and_empty_assignments() {
        let t = generate_euclidean_tsp(4, 8, 1.0).unwrap();
        let q = default_qubo(&t);
        let enc = q.encoding().unwrap();
        let ident = assignment_for(&[0, 1, 2, 3], enc);
        assert_eq!(decode_tour(&ident, &t, enc).unwrap().tour().unwrap().order, vec![0, 1, 2, 3]);
        match decode_tour(&[false; 9], &t, enc).unwrap() {
            DecodedTour::Infeasible(v) => assert_eq!(v.len(), 6),
            DecodedTour::Tour(_) => panic!("empty assignment decoded"),
        }
        assert!(decode_tour(&[false; 8], &t, enc).is_err());
    }

    #[test]
    fn zero_qubo_has_zero_value() {
        let q = QuboProblem::new(3, vec![0.0; 9]).unwrap();
        assert_eq!(q.value(&[true, false, true]).unwrap(), 0.0);
        assert!(q.value(&[true]).is_err());
    }
}
