//! Traveling salesman instances and their one-hot Ising encoding.
//!
//! Binary `x_{v,j} = 1` iff city `v` is visited at position `j`; spin index
//! `v * n + j`. The QUBO is
//!
//! ```text
//! A Σ_v (1 - Σ_j x_{v,j})² + A Σ_j (1 - Σ_v x_{v,j})² + B Σ_j Σ_{u≠v} d_{u,v} x_{u,j} x_{v,j+1}
//! ```
//!
//! with cyclic `j + 1`, mapped to spins through `x = (1 + σ)/2`. All constants
//! are dropped, so a valid tour `T` has energy `B·len(T) - offset`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{IsingModel, SpinConfiguration};

pub const MAX_DISTANCE: u32 = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct TspInstance {
    n: usize,
    /// Row-major `n × n`, zero diagonal.
    distances: Vec<u32>,
    penalty_a: f64,
    tour_weight_b: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// City appears at `count != 1` positions.
    City { city: usize, count: usize },
    /// Position is held by `count != 1` cities.
    Position { position: usize, count: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TourDecoding {
    /// `tour[j]` is the city at position `j`.
    Valid { tour: Vec<usize>, length: u64 },
    Invalid { violations: Vec<Violation> },
}

impl TourDecoding {
    pub fn is_valid(&self) -> bool {
        matches!(self, TourDecoding::Valid { .. })
    }

    pub fn length(&self) -> Option<u64> {
        match self {
            TourDecoding::Valid { length, .. } => Some(*length),
            TourDecoding::Invalid { .. } => None,
        }
    }
}

impl TspInstance {
    /// `distances` is a full symmetric matrix given row by row.
    pub fn new(n: usize, distances: Vec<u32>, penalty_a: f64, tour_weight_b: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid(format!("TSP needs at least 3 cities, got {n}")));
        }
        if distances.len() != n * n {
            return Err(Error::invalid(format!(
                "distance matrix has {} entries, expected {}",
                distances.len(),
                n * n
            )));
        }
        for i in 0..n {
            if distances[i * n + i] != 0 {
                return Err(Error::invalid(format!("d[{i}][{i}] must be 0")));
            }
            for j in i + 1..n {
                let (a, b) = (distances[i * n + j], distances[j * n + i]);
                if a != b {
                    return Err(Error::invalid(format!("d[{i}][{j}] = {a} but d[{j}][{i}] = {b}")));
                }
                if a == 0 {
                    return Err(Error::invalid(format!("d[{i}][{j}] must be positive")));
                }
            }
        }
        if !(penalty_a.is_finite() && penalty_a > 0.0 && tour_weight_b.is_finite() && tour_weight_b > 0.0) {
            return Err(Error::invalid("penalty A and tour weight B must be positive"));
        }
        Ok(TspInstance {
            n,
            distances,
            penalty_a,
            tour_weight_b,
        })
    }

    /// `A = max d`, `B = 1`.
    pub fn with_default_weights(n: usize, distances: Vec<u32>) -> Result<Self> {
        let a = distances.iter().copied().max().unwrap_or(0) as f64;
        TspInstance::new(n, distances, a, 1.0)
    }

    pub fn num_cities(&self) -> usize {
        self.n
    }

    pub fn num_spins(&self) -> usize {
        self.n * self.n
    }

    pub fn distance(&self, i: usize, j: usize) -> u32 {
        self.distances[i * self.n + j]
    }

    pub fn penalty_a(&self) -> f64 {
        self.penalty_a
    }

    pub fn tour_weight_b(&self) -> f64 {
        self.tour_weight_b
    }

    pub fn spin_index(&self, city: usize, position: usize) -> usize {
        city * self.n + position
    }

    /// Closed tour length; `tour[j]` is the city at position `j`.
    pub fn tour_length(&self, tour: &[usize]) -> u64 {
        (0..tour.len())
            .map(|j| u64::from(self.distance(tour[j], tour[(j + 1) % tour.len()])))
            .sum()
    }

    /// Binary QUBO coefficients: linear terms and unordered quadratic terms.
    fn qubo(&self) -> (Vec<f64>, BTreeMap<(usize, usize), f64>) {
        let n = self.n;
        let a = self.penalty_a;
        let b = self.tour_weight_b;
        let mut linear = vec![0.0; n * n];
        let mut quad: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        let mut add = |p: usize, q: usize, w: f64| {
            *quad.entry((p.min(q), p.max(q))).or_insert(0.0) += w;
        };
        // (1 - Σ x)² = 1 - Σ x + 2 Σ_{a<b} x_a x_b on binaries
        for v in 0..n {
            for j in 0..n {
                linear[v * n + j] -= 2.0 * a;
                for k in j + 1..n {
                    add(v * n + j, v * n + k, 2.0 * a);
                }
                for u in v + 1..n {
                    add(v * n + j, u * n + j, 2.0 * a);
                }
            }
        }
        for j in 0..n {
            let next = (j + 1) % n;
            for u in 0..n {
                for v in 0..n {
                    if u != v {
                        add(u * n + j, v * n + next, b * f64::from(self.distance(u, v)));
                    }
                }
            }
        }
        (linear, quad)
    }

    /// The Ising encoding and the dropped constant `offset`, with
    /// `QUBO(x) = H(σ) + offset` and so `H(σ_T) = B·len(T) - offset`.
    pub fn to_ising(&self) -> Result<(IsingModel, f64)> {
        let (linear, quad) = self.qubo();
        let n = linear.len();
        let mut fields: Vec<f64> = linear.iter().map(|c| -c / 2.0).collect();
        let mut couplings = Vec::with_capacity(quad.len());
        let mut offset = 2.0 * self.n as f64 * self.penalty_a + linear.iter().sum::<f64>() / 2.0;
        for (&(p, q), &w) in &quad {
            couplings.push((p, q, -w / 4.0));
            fields[p] -= w / 4.0;
            fields[q] -= w / 4.0;
            offset += w / 4.0;
        }
        Ok((IsingModel::new(n, couplings, fields)?, offset))
    }

    /// One-hot configuration of a tour.
    pub fn encode_tour(&self, tour: &[usize]) -> Result<SpinConfiguration> {
        let mut seen = vec![false; self.n];
        if tour.len() != self.n || tour.iter().any(|&c| c >= self.n || std::mem::replace(&mut seen[c], true)) {
            return Err(Error::invalid(format!("{tour:?} is not a permutation of 0..{}", self.n)));
        }
        let mut spins = vec![-1i8; self.n * self.n];
        for (j, &city) in tour.iter().enumerate() {
            spins[self.spin_index(city, j)] = 1;
        }
        SpinConfiguration::new(spins)
    }

    /// Reads the tour back if the `+1` spins form a permutation matrix.
    pub fn decode_tour(&self, config: &SpinConfiguration) -> Result<TourDecoding> {
        let n = self.n;
        if config.len() != n * n {
            return Err(Error::invalid(format!(
                "configuration has {} spins, TSP on {n} cities needs {}",
                config.len(),
                n * n
            )));
        }
        let up = |v: usize, j: usize| config.spin(v * n + j) == 1;
        let mut violations = Vec::new();
        for city in 0..n {
            let count = (0..n).filter(|&j| up(city, j)).count();
            if count != 1 {
                violations.push(Violation::City { city, count });
            }
        }
        for position in 0..n {
            let count = (0..n).filter(|&v| up(v, position)).count();
            if count != 1 {
                violations.push(Violation::Position { position, count });
            }
        }
        if !violations.is_empty() {
            return Ok(TourDecoding::Invalid { violations });
        }
        let tour: Vec<usize> = (0..n).map(|j| (0..n).find(|&v| up(v, j)).unwrap()).collect();
        let length = self.tour_length(&tour);
        Ok(TourDecoding::Valid { tour, length })
    }

    /// Constraint part `A[Σ_v (1-Σ_j x)² + Σ_j (1-Σ_v x)²]` of the QUBO.
    pub fn penalty(&self, config: &SpinConfiguration) -> f64 {
        let n = self.n;
        let x = |v: usize, j: usize| if config.spin(v * n + j) == 1 { 1.0 } else { 0.0 };
        let rows: f64 = (0..n)
            .map(|v| (1.0 - (0..n).map(|j| x(v, j)).sum::<f64>()).powi(2))
            .sum();
        let cols: f64 = (0..n)
            .map(|j| (1.0 - (0..n).map(|v| x(v, j)).sum::<f64>()).powi(2))
            .sum();
        self.penalty_a * (rows + cols)
    }

    /// Tour part `B Σ_j Σ_{u≠v} d_{u,v} x_{u,j} x_{v,j+1}` of the QUBO.
    pub fn tour_term(&self, config: &SpinConfiguration) -> f64 {
        let n = self.n;
        let mut total = 0.0;
        for j in 0..n {
            for u in 0..n {
                for v in 0..n {
                    if u != v && config.spin(u * n + j) == 1 && config.spin(v * n + (j + 1) % n) == 1 {
                        total += f64::from(self.distance(u, v));
                    }
                }
            }
        }
        self.tour_weight_b * total
    }
}

/// All tours starting at city 0 (`(n-1)!` of them), in lexicographic order.
pub fn tours_from_origin(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for c in 0..used.len() {
            if !used[c] {
                used[c] = true;
                prefix.push(c);
                extend(prefix, used, out);
                prefix.pop();
                used[c] = false;
            }
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut used = vec![false; n];
    used[0] = true;
    extend(&mut vec![0], &mut used, &mut out);
    out
}

/// Every permutation of `0..n` (`n!` of them).
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for base in tours_from_origin(n) {
        for shift in 0..n {
            out.push((0..n).map(|j| base[(j + shift) % n]).collect());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three() -> TspInstance {
        TspInstance::with_default_weights(3, vec![0, 4, 9, 4, 0, 7, 9, 7, 0]).unwrap()
    }

    fn four() -> TspInstance {
        #[rustfmt::skip]
        let d = vec![
            0, 3, 8, 5,
            3, 0, 2, 9,
            8, 2, 0, 4,
            5, 9, 4, 0,
        ];
        TspInstance::with_default_weights(4, d).unwrap()
    }

    #[test]
    fn validation() {
        assert!(TspInstance::with_default_weights(2, vec![0, 1, 1, 0]).is_err());
        assert!(TspInstance::with_default_weights(3, vec![0, 1, 2, 1, 0, 3, 2, 4, 0]).is_err());
        assert!(TspInstance::with_default_weights(3, vec![0, 0, 2, 0, 0, 3, 2, 3, 0]).is_err());
        let t = three();
        assert_eq!(t.penalty_a(), 9.0);
        assert_eq!(t.tour_weight_b(), 1.0);
    }

    #[test]
    fn identity_tour_decodes() {
        let t = four();
        let cfg = t.encode_tour(&[0, 1, 2, 3]).unwrap();
        assert_eq!(
            t.decode_tour(&cfg).unwrap(),
            TourDecoding::Valid {
                tour: vec![0, 1, 2, 3],
                length: 3 + 2 + 4 + 5
            }
        );
    }

    #[test]
    fn all_down_violates_every_constraint() {
        let t = four();
        let cfg = SpinConfiguration::new(vec![-1; 16]).unwrap();
        match t.decode_tour(&cfg).unwrap() {
            TourDecoding::Invalid { violations } => {
                assert_eq!(violations.len(), 8);
                assert!(violations.iter().all(|v| matches!(
                    v,
                    Violation::City { count: 0, .. } | Violation::Position { count: 0, .. }
                )));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn three_city_tours_share_energy() {
        let t = three();
        let (model, offset) = t.to_ising().unwrap();
        let energies: Vec<f64> = all_permutations(3)
            .iter()
            .map(|tour| {
                let cfg = t.encode_tour(tour).unwrap();
                assert_eq!(t.decode_tour(&cfg).unwrap().length(), Some(4 + 7 + 9));
                model.energy(&cfg).unwrap()
            })
            .collect();
        assert_eq!(energies.len(), 6);
        assert!(energies.iter().all(|&e| e == 20.0 - offset));
    }

    #[test]
    fn encoding_matches_qubo_on_every_configuration() {
        let t = four();
        let (model, offset) = t.to_ising().unwrap();
        for idx in 0..(1u64 << 16) {
            let cfg = SpinConfiguration::from_index(idx, 16);
            let qubo = t.penalty(&cfg) + t.tour_term(&cfg);
            assert_eq!(model.energy(&cfg).unwrap() + offset, qubo, "config {cfg}");
        }
    }

    #[test]
    fn single_flip_from_valid_tour_raises_energy() {
        let t = four();
        let (model, _) = t.to_ising().unwrap();
        for tour in all_permutations(4) {
            let cfg = t.encode_tour(&tour).unwrap();
            assert_eq!(t.penalty(&cfg), 0.0);
            for x in 0..16 {
                let flipped = cfg.flipped(x);
                assert_eq!(t.penalty(&flipped), 2.0 * t.penalty_a());
                assert!(t.tour_term(&cfg) - t.tour_term(&flipped) <= 2.0 * t.penalty_a());
                assert!(model.flip_delta(&cfg, x).unwrap() >= 0.0);
            }
        }
    }

    #[test]
    fn permutation_counts() {
        assert_eq!(tours_from_origin(5).len(), 24);
        let all = all_permutations(4);
        assert_eq!(all.len(), 24);
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 24);
    }
}
