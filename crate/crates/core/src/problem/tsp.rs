use itertools::Itertools;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ProblemError;

/// Exhaustive tour search refuses instances above this size.
pub const MAX_BRUTE_FORCE_CITIES: usize = 12;

/// Symmetric TSP on a complete graph.
///
/// JSON layout: `{"n", "coords" (optional), "distances" (row-major), "seed"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTsp", into = "RawTsp")]
pub struct TspInstance {
    n: usize,
    coords: Option<Vec<[f64; 2]>>,
    distances: Vec<f64>,
    seed: u64,
}

#[derive(Serialize, Deserialize)]
struct RawTsp {
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coords: Option<Vec<[f64; 2]>>,
    distances: Vec<f64>,
    #[serde(default)]
    seed: u64,
}

impl TryFrom<RawTsp> for TspInstance {
    type Error = ProblemError;

    fn try_from(raw: RawTsp) -> Result<Self, Self::Error> {
        let inst = TspInstance::from_distances(raw.n, raw.distances, raw.seed)?;
        match raw.coords {
            Some(c) if c.len() != raw.n => Err(ProblemError::DimensionMismatch {
                expected: raw.n,
                got: c.len(),
            }),
            coords => Ok(TspInstance { coords, ..inst }),
        }
    }
}

impl From<TspInstance> for RawTsp {
    fn from(t: TspInstance) -> Self {
        RawTsp {
            n: t.n,
            coords: t.coords,
            distances: t.distances,
            seed: t.seed,
        }
    }
}

impl TspInstance {
    /// Builds an instance from a row-major distance matrix.
    pub fn from_distances(n: usize, distances: Vec<f64>, seed: u64) -> Result<Self, ProblemError> {
        if n < 3 {
            return Err(ProblemError::InvalidInstance(format!("need at least 3 cities, got {n}")));
        }
        if distances.len() != n * n {
            return Err(ProblemError::DimensionMismatch {
                expected: n * n,
                got: distances.len(),
            });
        }
        for i in 0..n {
            if distances[i * n + i] != 0.0 {
                return Err(ProblemError::InvalidInstance(format!("d[{i}][{i}] must be 0")));
            }
            for j in 0..n {
                let d = distances[i * n + j];
                if i != j && !(d.is_finite() && d > 0.0) {
                    return Err(ProblemError::InvalidInstance(format!("d[{i}][{j}] = {d} must be positive")));
                }
                if d != distances[j * n + i] {
                    return Err(ProblemError::InvalidInstance(format!("distance matrix not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(TspInstance {
            n,
            coords: None,
            distances,
            seed,
        })
    }

    /// Builds a Euclidean instance from planar coordinates.
    pub fn from_coords(coords: Vec<[f64; 2]>, seed: u64) -> Result<Self, ProblemError> {
        let n = coords.len();
        let mut distances = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = (coords[i][0] - coords[j][0]).hypot(coords[i][1] - coords[j][1]);
                distances[i * n + j] = d;
                distances[j * n + i] = d;
            }
        }
        let inst = Self::from_distances(n, distances, seed)?;
        Ok(TspInstance {
            coords: Some(coords),
            ..inst
        })
    }

    pub fn n_cities(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn coords(&self) -> Option<&[[f64; 2]]> {
        self.coords.as_deref()
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distances[i * self.n + j]
    }

    pub fn max_distance(&self) -> f64 {
        self.distances.iter().copied().fold(0.0, f64::max)
    }

    /// Closed tour length of `order`.
    pub fn tour_length(&self, order: &[usize]) -> Result<f64, ProblemError> {
        if order.len() != self.n {
            return Err(ProblemError::DimensionMismatch {
                expected: self.n,
                got: order.len(),
            });
        }
        let mut seen = vec![false; self.n];
        for &c in order {
            if c >= self.n || seen[c] {
                return Err(ProblemError::InvalidInstance(format!("order is not a permutation: {order:?}")));
            }
            seen[c] = true;
        }
        Ok((0..self.n).map(|k| self.distance(order[k], order[(k + 1) % self.n])).sum())
    }
}

/// Hamilton cycle starting at city 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    pub order: Vec<usize>,
    pub length: f64,
}

impl Tour {
    pub fn new(tsp: &TspInstance, order: Vec<usize>) -> Result<Self, ProblemError> {
        let length = tsp.tour_length(&order)?;
        if order.first() != Some(&0) {
            return Err(ProblemError::InvalidInstance("tour must start at city 0".into()));
        }
        Ok(Tour { order, length })
    }

    /// True when both tours describe the same cycle, in either direction.
    pub fn same_cycle(&self, other: &Tour) -> bool {
        if self.order.len() != other.order.len() {
            return false;
        }
        let mut rev = other.order.clone();
        rev[1..].reverse();
        self.order == other.order || self.order == rev
    }
}

/// Cities placed i.i.d. uniformly in `[0, side]^2`.
pub fn generate_euclidean_tsp(n: usize, seed: u64, side: f64) -> Result<TspInstance, ProblemError> {
    if n < 3 {
        return Err(ProblemError::InvalidInstance(format!("need at least 3 cities, got {n}")));
    }
    if !(side.is_finite() && side > 0.0) {
        return Err(ProblemError::InvalidInstance(format!("box side {side} must be positive")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = (0..n).map(|_| [rng.gen::<f64>() * side, rng.gen::<f64>() * side]).collect();
    TspInstance::from_coords(coords, seed)
}

/// Optimal tour by enumerating the `(N-1)!/2` undirected orders.
pub fn tsp_brute_force(tsp: &TspInstance) -> Result<Tour, ProblemError> {
    let n = tsp.n_cities();
    if n > MAX_BRUTE_FORCE_CITIES {
        return Err(ProblemError::TooLarge {
            what: "brute-force TSP",
            size: n,
            limit: MAX_BRUTE_FORCE_CITIES,
        });
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for perm in (1..n).permutations(n - 1) {
        // each undirected cycle appears twice; keep the orientation with perm[0] < perm[last]
        if perm[0] > perm[n - 2] {
            continue;
        }
        let order: Vec<usize> = std::iter::once(0).chain(perm).collect();
        let len: f64 = (0..n).map(|k| tsp.distance(order[k], order[(k + 1) % n])).sum();
        if best.as_ref().is_none_or(|(b, _)| len < *b) {
            best = Some((len, order));
        }
    }
    let (length, order) = best.expect("n >= 3 has at least one tour");
    Ok(Tour { order, length })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic_per_seed() {
        let a = generate_euclidean_tsp(7, 11, 1.0).unwrap();
        let b = generate_euclidean_tsp(7, 11, 1.0).unwrap();
        let c = generate_euclidean_tsp(7, 12, 1.0).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.n_cities(), 7);
        let mut pairs = vec![];
        for i in 0..7 {
            for j in (i + 1)..7 {
                pairs.push(a.distance(i, j));
                assert!(a.distance(i, j) > 0.0);
            }
        }
        assert_eq!(pairs.len(), 21);
        for p in a.coords().unwrap() {
            assert!((0.0..=1.0).contains(&p[0]) && (0.0..=1.0).contains(&p[1]));
        }
    }

    #[test]
    fn too_few_cities_rejected() {
        assert!(matches!(generate_euclidean_tsp(2, 0, 1.0), Err(ProblemError::InvalidInstance(_))));
    }

    #[test]
    fn triangle_optimum_is_perimeter() {
        let t = generate_euclidean_tsp(3, 5, 1.0).unwrap();
        let tour = tsp_brute_force(&t).unwrap();
        let perimeter = t.distance(0, 1) + t.distance(1, 2) + t.distance(2, 0);
        assert!((tour.length - perimeter).abs() < 1e-12);
    }

    #[test]
    fn unit_square_tour_has_length_four() {
        let t = TspInstance::from_coords(vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]], 0).unwrap();
        let tour = tsp_brute_force(&t).unwrap();
        assert!((tour.length - 4.0).abs() < 1e-12);
        assert_eq!(tour.order, vec![0, 2, 1, 3]);
    }

    #[test]
    fn brute_force_matches_naive_enumeration_for_five_cities() {
        let t = generate_euclidean_tsp(5, 42, 1.0).unwrap();
        let tour = tsp_brute_force(&t).unwrap();
        // all 4! orders, no symmetry pruning
        let best = (1..5)
            .permutations(4)
            .map(|p| {
                let mut o = vec![0];
                o.extend(p);
                t.tour_length(&o).unwrap()
            })
            .fold(f64::INFINITY, f64::min);
        assert!((tour.length - best).abs() < 1e-12);
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let t = generate_euclidean_tsp(4, 3, 2.0).unwrap();
        let text = serde_json::to_string(&t).unwrap();
        let back: TspInstance = serde_json::from_str(&text).unwrap();
        assert_eq!(back, t);
        let bad = r#"{"n":3,"distances":[0,1,1,1,0,1,1,2,0],"seed":0}"#;
        assert!(serde_json::from_str::<TspInstance>(bad).is_err());
    }

    #[test]
    fn tour_length_rejects_non_permutations() {
        let t = generate_euclidean_tsp(4, 3, 1.0).unwrap();
        assert!(t.tour_length(&[0, 1, 1, 2]).is_err());
        assert!(t.tour_length(&[0, 1, 2]).is_err());
    }
}
