//! Ising Hamiltonians `H(σ) = -½ Σ J_xy σ_x σ_y - Σ h_x σ_x` on a sparse coupling graph.
//!
//! Couplings are stored once per direction in a compressed adjacency list with
//! neighbours sorted ascending, so every unordered pair appears in both rows
//! with the same value.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Models at or below this size get their spectrum from a dense eigensolver.
pub const DENSE_EIGEN_MAX: usize = 64;

/// Relative tolerance of the power-iteration eigenvalue estimate.
pub const EIGEN_TOLERANCE: f64 = 1e-8;
const POWER_ITERATION_FLOOR: usize = 10_000;

/// An assignment of ±1 spins to the vertices `0..N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinConfiguration(Vec<i8>);

impl SpinConfiguration {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(pos) = spins.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::invalid(format!(
                "spin at vertex {pos} is {}, expected +1 or -1",
                spins[pos]
            )));
        }
        Ok(SpinConfiguration(spins))
    }

    pub fn all_up(n: usize) -> Self {
        SpinConfiguration(vec![1; n])
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        SpinConfiguration((0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect())
    }

    /// Decodes a configuration from its integer index: bit `i` is `(σ_i + 1) / 2`.
    pub fn from_index(index: u64, n: usize) -> Self {
        assert!(n <= 64, "index encoding holds at most 64 spins");
        SpinConfiguration((0..n).map(|i| if (index >> i) & 1 == 1 { 1 } else { -1 }).collect())
    }

    pub fn to_index(&self) -> u64 {
        assert!(self.0.len() <= 64, "index encoding holds at most 64 spins");
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == 1)
            .fold(0u64, |acc, (i, _)| acc | (1u64 << i))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn spins(&self) -> &[i8] {
        &self.0
    }

    pub fn spin(&self, x: usize) -> i8 {
        self.0[x]
    }

    pub fn flip(&mut self, x: usize) {
        self.0[x] = -self.0[x];
    }

    pub fn flipped(&self, x: usize) -> Self {
        let mut out = self.clone();
        out.flip(x);
        out
    }

    pub fn negated(&self) -> Self {
        SpinConfiguration(self.0.iter().map(|&s| -s).collect())
    }

    pub fn hamming(&self, other: &SpinConfiguration) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }

    pub(crate) fn spins_mut(&mut self) -> &mut [i8] {
        &mut self.0
    }
}

impl std::fmt::Display for SpinConfiguration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &s in &self.0 {
            f.write_str(if s > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

/// Symmetric sparse couplings `J` and fields `h` on a fixed vertex set.
///
/// Immutable after construction.
#[derive(Clone, Debug, PartialEq)]
pub struct IsingModel {
    n: usize,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    weights: Vec<f64>,
    fields: Vec<f64>,
    num_couplings: usize,
}

impl IsingModel {
    /// Builds a model from unordered coupling triples `(x, y, J_xy)`.
    ///
    /// Each pair may be given once in either orientation. Zero couplings are
    /// dropped; self-couplings, duplicates and non-finite values are rejected.
    /// An empty `fields` vector means `h ≡ 0`.
    pub fn new<I>(n: usize, couplings: I, fields: Vec<f64>) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n == 0 {
            return Err(Error::invalid("model needs at least one vertex"));
        }
        let fields = if fields.is_empty() { vec![0.0; n] } else { fields };
        if fields.len() != n {
            return Err(Error::invalid(format!(
                "{} fields given for {n} vertices",
                fields.len()
            )));
        }
        if let Some(x) = fields.iter().position(|h| !h.is_finite()) {
            return Err(Error::invalid(format!("field h_{x} is not finite")));
        }

        let mut pairs: Vec<(usize, usize, f64)> = Vec::new();
        for (x, y, j) in couplings {
            if x >= n || y >= n {
                return Err(Error::invalid(format!(
                    "coupling ({x}, {y}) out of range for N = {n}"
                )));
            }
            if x == y {
                return Err(Error::invalid(format!("self-coupling at vertex {x}")));
            }
            if !j.is_finite() {
                return Err(Error::invalid(format!("coupling ({x}, {y}) is not finite")));
            }
            if j != 0.0 {
                pairs.push((x.min(y), x.max(y), j));
            }
        }
        pairs.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        if let Some(w) = pairs.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::invalid(format!(
                "duplicate coupling ({}, {})",
                w[0].0, w[0].1
            )));
        }

        let mut degree = vec![0usize; n];
        for &(x, y, _) in &pairs {
            degree[x] += 1;
            degree[y] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let total = *offsets.last().unwrap();
        let mut neighbors = vec![0usize; total];
        let mut weights = vec![0.0; total];
        let mut cursor = offsets[..n].to_vec();
        // Pairs are sorted by (min, max), so filling both directions in this
        // order leaves every row sorted ascending.
        let mut both: Vec<(usize, usize, f64)> = pairs
            .iter()
            .flat_map(|&(x, y, j)| [(x, y, j), (y, x, j)])
            .collect();
        both.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        for (x, y, j) in both {
            neighbors[cursor[x]] = y;
            weights[cursor[x]] = j;
            cursor[x] += 1;
        }

        Ok(IsingModel {
            n,
            offsets,
            neighbors,
            weights,
            fields,
            num_couplings: pairs.len(),
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    /// Number of stored unordered pairs, i.e. `|E|` of the coupling graph.
    pub fn num_couplings(&self) -> usize {
        self.num_couplings
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn field(&self, x: usize) -> f64 {
        self.fields[x]
    }

    pub fn has_fields(&self) -> bool {
        self.fields.iter().any(|&h| h != 0.0)
    }

    /// Neighbours `y` of `x` with `J_xy != 0`, ascending in `y`.
    pub fn neighbors(&self, x: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[x]..self.offsets[x + 1];
        self.neighbors[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    pub fn degree(&self, x: usize) -> usize {
        self.offsets[x + 1] - self.offsets[x]
    }

    pub fn coupling(&self, x: usize, y: usize) -> f64 {
        let range = self.offsets[x]..self.offsets[x + 1];
        match self.neighbors[range.clone()].binary_search(&y) {
            Ok(k) => self.weights[range.start + k],
            Err(_) => 0.0,
        }
    }

    /// Unordered couplings `(x, y, J_xy)` with `x < y`, in lexicographic order.
    pub fn couplings(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |x| {
            self.neighbors(x)
                .filter(move |&(y, _)| y > x)
                .map(move |(y, j)| (x, y, j))
        })
    }

    /// `Σ_y |J_xy|` for vertex `x`.
    pub fn abs_coupling_sum(&self, x: usize) -> f64 {
        self.neighbors(x).map(|(_, j)| j.abs()).sum()
    }

    fn check_config(&self, config: &SpinConfiguration) -> Result<()> {
        if config.len() != self.n {
            return Err(Error::invalid(format!(
                "configuration has {} spins, model has {}",
                config.len(),
                self.n
            )));
        }
        Ok(())
    }

    fn check_vertex(&self, x: usize) -> Result<()> {
        if x >= self.n {
            return Err(Error::invalid(format!("vertex {x} out of range for N = {}", self.n)));
        }
        Ok(())
    }

    pub fn energy(&self, config: &SpinConfiguration) -> Result<f64> {
        self.check_config(config)?;
        Ok(self.energy_of(config.spins()))
    }

    /// Energy of a raw spin slice; the caller guarantees the length.
    ///
    /// Summation order is fixed (pairs ascending, then fields), so the same
    /// configuration always produces the same double.
    pub fn energy_of(&self, spins: &[i8]) -> f64 {
        debug_assert_eq!(spins.len(), self.n);
        let mut bonds = 0.0;
        for x in 0..self.n {
            let sx = f64::from(spins[x]);
            for (y, j) in self.neighbors(x) {
                if y > x {
                    bonds += j * sx * f64::from(spins[y]);
                }
            }
        }
        let zeeman: f64 = self
            .fields
            .iter()
            .zip(spins)
            .map(|(h, &s)| h * f64::from(s))
            .sum();
        -bonds - zeeman
    }

    pub fn cavity_field(&self, config: &SpinConfiguration, x: usize) -> Result<f64> {
        self.check_config(config)?;
        self.check_vertex(x)?;
        Ok(self.cavity_field_of(config.spins(), x))
    }

    /// `h̃_x(σ) = Σ_y J_xy σ_y + h_x`.
    pub fn cavity_field_of(&self, spins: &[i8], x: usize) -> f64 {
        self.neighbors(x)
            .map(|(y, j)| j * f64::from(spins[y]))
            .sum::<f64>()
            + self.fields[x]
    }

    pub fn cavity_fields_of(&self, spins: &[i8]) -> Vec<f64> {
        (0..self.n).map(|x| self.cavity_field_of(spins, x)).collect()
    }

    /// `H(σ^x) - H(σ) = 2 σ_x h̃_x(σ)`.
    pub fn flip_delta(&self, config: &SpinConfiguration, x: usize) -> Result<f64> {
        let field = self.cavity_field(config, x)?;
        Ok(2.0 * f64::from(config.spin(x)) * field)
    }

    /// The dense matrix `[-J_xy]` with zero diagonal.
    pub fn negated_coupling_matrix(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for x in 0..self.n {
            for (y, j) in self.neighbors(x) {
                m[(x, y)] = -j;
            }
        }
        m
    }

    /// Largest eigenvalue `λ` of `[-J_xy]`.
    ///
    /// Dense symmetric eigensolve up to [`DENSE_EIGEN_MAX`] vertices, shifted
    /// power iteration above that.
    pub fn largest_eigenvalue(&self) -> Result<f64> {
        if self.n <= DENSE_EIGEN_MAX {
            let eig = SymmetricEigen::new(self.negated_coupling_matrix());
            Ok(eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        } else {
            self.largest_eigenvalue_power()
        }
    }

    /// Power iteration on `-J + cI` with `c = max_x Σ_y |J_xy|`, which makes
    /// the spectrum nonnegative so the top eigenvalue dominates.
    pub fn largest_eigenvalue_power(&self) -> Result<f64> {
        let n = self.n;
        let shift = (0..n).map(|x| self.abs_coupling_sum(x)).fold(0.0, f64::max);
        if shift == 0.0 {
            return Ok(0.0);
        }
        let cap = ((10.0 * n as f64 * (n as f64).ln()).ceil() as usize).max(POWER_ITERATION_FLOOR);
        // Deterministic start with a nonzero overlap on every coordinate.
        let mut v = DVector::from_fn(n, |i, _| 1.0 + 0.1 * ((i % 7) as f64));
        v /= v.norm();
        let apply = |v: &DVector<f64>| -> DVector<f64> {
            DVector::from_fn(n, |x, _| {
                shift * v[x] - self.neighbors(x).map(|(y, j)| j * v[y]).sum::<f64>()
            })
        };
        let mut residual = f64::INFINITY;
        let mut mu = 0.0;
        for _ in 0..cap {
            let w = apply(&v);
            mu = v.dot(&w);
            residual = (&w - &v * mu).norm();
            if residual <= EIGEN_TOLERANCE * mu.abs().max(1.0) {
                return Ok(mu - shift);
            }
            let norm = w.norm();
            if norm == 0.0 {
                break;
            }
            v = w / norm;
        }
        Err(Error::Numerical {
            message: format!(
                "power iteration for the largest eigenvalue of [-J] did not converge in {cap} \
                 iterations (N = {n}, estimate {:.12}, residual {residual:.3e})",
                mu - shift
            ),
        })
    }

    /// `Γ_x = q_x + |h_x| + Σ_y |J_xy|` for every vertex.
    pub fn gamma_terms(&self, pinning: &[f64]) -> Result<Vec<f64>> {
        if pinning.len() != self.n {
            return Err(Error::invalid(format!(
                "{} pinning values for {} vertices",
                pinning.len(),
                self.n
            )));
        }
        if let Some(x) = pinning.iter().position(|&q| !(q >= 0.0)) {
            return Err(Error::invalid(format!(
                "pinning q_{x} = {} must be nonnegative",
                pinning[x]
            )));
        }
        Ok((0..self.n)
            .map(|x| pinning[x] + self.fields[x].abs() + self.abs_coupling_sum(x))
            .collect())
    }

    /// `Γ = Σ_x Γ_x`.
    pub fn gamma(&self, pinning: &[f64]) -> Result<f64> {
        Ok(self.gamma_terms(pinning)?.iter().sum())
    }
}
