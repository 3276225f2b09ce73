//! Exact small-system computations: exhaustive ground states, full transition
//! matrices, mixing-time bounds and their numerical verification.
//!
//! Configurations are indexed by `bit i = (σ_i + 1) / 2` (little endian in the
//! vertex index), matching [`SpinConfiguration::from_index`].

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::EngineSpec;
use crate::error::{Error, Result};
use crate::model::{IsingModel, SpinConfiguration};
use crate::schedule::AnnealingSchedule;

pub const BRUTE_FORCE_MAX: usize = 30;
pub const KERNEL_MAX: usize = 12;
pub const VERIFY_MAX: usize = 10;
/// Minimizers beyond this many are counted but not stored.
pub const MAX_STORED_GROUND_STATES: usize = 1 << 20;

const STATIONARY_TOLERANCE: f64 = 1e-13;
const STATIONARY_MAX_ITERATIONS: usize = 1_000_000;

/// All minimizers of `H` and the minimum value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroundStateSet {
    pub num_vertices: usize,
    pub min_energy: f64,
    /// Configuration indices, ascending.
    pub states: Vec<u64>,
    /// Number of minimizers, which exceeds `states.len()` only when truncated.
    pub count: u64,
    pub truncated: bool,
}

impl GroundStateSet {
    pub fn configurations(&self) -> impl Iterator<Item = SpinConfiguration> + '_ {
        self.states
            .iter()
            .map(|&i| SpinConfiguration::from_index(i, self.num_vertices))
    }

    pub fn contains(&self, config: &SpinConfiguration) -> bool {
        self.states.binary_search(&config.to_index()).is_ok()
    }

    /// The uniform law on the minimizers, as a dense vector over `2^N` states.
    pub fn uniform_distribution(&self) -> Result<Vec<f64>> {
        if self.truncated || self.num_vertices > KERNEL_MAX {
            return Err(Error::TooLarge {
                what: "dense ground-state distribution",
                n: self.num_vertices,
                cap: KERNEL_MAX,
            });
        }
        let mut out = vec![0.0; 1usize << self.num_vertices];
        let w = 1.0 / self.states.len() as f64;
        for &s in &self.states {
            out[s as usize] = w;
        }
        Ok(out)
    }
}

struct ChunkResult {
    min_energy: f64,
    states: Vec<u64>,
    count: u64,
}

pub fn brute_force_ground_states(model: &IsingModel) -> Result<GroundStateSet> {
    brute_force_ground_states_capped(model, BRUTE_FORCE_MAX)
}

/// Exhaustive enumeration of all `2^N` configurations.
///
/// Each worker walks a Gray code over the low bits with incrementally updated
/// cavity fields; any configuration whose running energy comes within a small
/// tolerance of the best so far is re-evaluated exactly, so the reported
/// minimum and minimizers are exact recomputations. Without fields the top
/// spin is fixed to `+1` and mirrored minimizers are added afterwards.
pub fn brute_force_ground_states_capped(model: &IsingModel, cap: usize) -> Result<GroundStateSet> {
    let n = model.num_vertices();
    if n > cap || n > 63 {
        return Err(Error::TooLarge {
            what: "brute-force ground-state enumeration",
            n,
            cap: cap.min(63),
        });
    }
    let symmetric = !model.has_fields() && n > 1;
    let free = if symmetric { n - 1 } else { n };
    let prefix_bits = free.min(8);
    let gray_bits = free - prefix_bits;
    let scale = model.couplings().map(|(_, _, j)| j.abs()).sum::<f64>()
        + model.fields().iter().map(|h| h.abs()).sum::<f64>();
    let tolerance = 1e-9 * (1.0 + scale);

    let chunks: Vec<ChunkResult> = (0..1u64 << prefix_bits)
        .into_par_iter()
        .map(|prefix| {
            let mut index = prefix << gray_bits;
            if symmetric {
                index |= 1 << (n - 1);
            }
            let mut spins = SpinConfiguration::from_index(index, n).spins().to_vec();
            let mut cavity = model.cavity_fields_of(&spins);
            let mut energy = model.energy_of(&spins);
            let mut best = ChunkResult {
                min_energy: f64::INFINITY,
                states: Vec::new(),
                count: 0,
            };
            let consider = |energy: f64, spins: &[i8], index: u64, best: &mut ChunkResult| {
                if energy > best.min_energy + tolerance {
                    return;
                }
                let exact = model.energy_of(spins);
                if exact < best.min_energy {
                    best.min_energy = exact;
                    best.states.clear();
                    best.count = 0;
                }
                if exact == best.min_energy {
                    best.count += 1;
                    if best.states.len() < MAX_STORED_GROUND_STATES {
                        best.states.push(index);
                    }
                }
            };
            consider(energy, &spins, index, &mut best);
            for step in 1..(1u64 << gray_bits) {
                let x = step.trailing_zeros() as usize;
                let old = f64::from(spins[x]);
                energy += 2.0 * old * cavity[x];
                spins[x] = -spins[x];
                index ^= 1 << x;
                for (y, j) in model.neighbors(x) {
                    cavity[y] -= 2.0 * j * old;
                }
                consider(energy, &spins, index, &mut best);
            }
            best
        })
        .collect();

    let min_energy = chunks
        .iter()
        .map(|c| c.min_energy)
        .fold(f64::INFINITY, f64::min);
    let mut states = Vec::new();
    let mut count = 0u64;
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    for chunk in chunks.iter().filter(|c| c.min_energy == min_energy) {
        count += chunk.count;
        states.extend_from_slice(&chunk.states);
    }
    if symmetric {
        count *= 2;
        let mirrored: Vec<u64> = states.iter().map(|&s| !s & mask).collect();
        states.extend(mirrored);
    }
    states.sort_unstable();
    states.truncate(MAX_STORED_GROUND_STATES);
    Ok(GroundStateSet {
        num_vertices: n,
        min_energy,
        truncated: (states.len() as u64) < count,
        states,
        count,
    })
}

/// Full `2^N × 2^N` transition matrix of one engine at fixed `β`.
#[derive(Clone, Debug)]
pub struct ExactKernel {
    pub engine: EngineSpec,
    pub beta: f64,
    pub num_vertices: usize,
    /// Row `σ`, column `τ`: probability of moving from `σ` to `τ`.
    pub matrix: DMatrix<f64>,
}

impl ExactKernel {
    pub fn num_states(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.matrix.row_iter().map(|r| r.sum()).collect()
    }

    /// `μ P`.
    pub fn push_forward(&self, mu: &[f64]) -> Vec<f64> {
        let m = self.num_states();
        let mut out = vec![0.0; m];
        for (s, &w) in mu.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (t, o) in out.iter_mut().enumerate() {
                *o += w * self.matrix[(s, t)];
            }
        }
        out
    }

    /// `P^t` by repeated squaring.
    pub fn power(&self, t: u64) -> DMatrix<f64> {
        let m = self.num_states();
        let mut result = DMatrix::identity(m, m);
        let mut base = self.matrix.clone();
        let mut e = t;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }
}

/// Row of a product kernel: independent per-site laws `up[x]`, `down[x]`.
fn product_row(up: &[f64], down: &[f64]) -> Vec<f64> {
    let n = up.len();
    let mut row = Vec::with_capacity(1 << n);
    row.push(1.0);
    for x in 0..n {
        let len = row.len();
        row.extend_from_within(..len);
        for k in 0..len {
            row[k] *= down[x];
            row[k + len] *= up[x];
        }
    }
    row
}

pub fn build_exact_kernel(model: &IsingModel, spec: &EngineSpec, beta: f64) -> Result<ExactKernel> {
    let n = model.num_vertices();
    if n > KERNEL_MAX {
        return Err(Error::TooLarge {
            what: "exact kernel construction",
            n,
            cap: KERNEL_MAX,
        });
    }
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::invalid(format!("beta must be finite and nonnegative, got {beta}")));
    }
    spec.validate(model)?;
    let m = 1usize << n;
    let rows: Vec<Vec<f64>> = (0..m as u64)
        .into_par_iter()
        .map(|s| {
            let sigma = SpinConfiguration::from_index(s, n);
            let spins = sigma.spins();
            match spec {
                EngineSpec::Glauber => {
                    let mut row = vec![0.0; m];
                    let w = 1.0 / n as f64;
                    for x in 0..n {
                        let cavity = model.cavity_field_of(spins, x);
                        let stay = spec.site_prob(cavity, spins[x], x, beta, spins[x]);
                        let flip = spec.site_prob(cavity, spins[x], x, beta, -spins[x]);
                        row[s as usize] += w * stay;
                        row[(s ^ (1 << x)) as usize] += w * flip;
                    }
                    row
                }
                _ => {
                    let (up, down): (Vec<f64>, Vec<f64>) = (0..n)
                        .map(|x| {
                            let cavity = model.cavity_field_of(spins, x);
                            (
                                spec.site_prob(cavity, spins[x], x, beta, 1),
                                spec.site_prob(cavity, spins[x], x, beta, -1),
                            )
                        })
                        .unzip();
                    product_row(&up, &down)
                }
            }
        })
        .collect();
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    Ok(ExactKernel {
        engine: spec.clone(),
        beta,
        num_vertices: n,
        matrix: DMatrix::from_row_slice(m, m, &flat),
    })
}

/// Contraction coefficient `r` and the resulting mixing-time bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MixingBound {
    pub r: f64,
    /// `None` when `r ≥ 1` and the bound does not apply.
    pub t_bound: Option<u64>,
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("delta must lie in (0, 1), got {delta}")))
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta >= 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("beta must be finite and nonnegative, got {beta}")))
    }
}

/// `⌈(log N - log δ) / log(1/r)⌉`, at least 1; `r = 0` gives 1.
fn bound_from_r(n: usize, r: f64, delta: f64) -> MixingBound {
    let t_bound = if r >= 1.0 {
        None
    } else if r == 0.0 {
        Some(1)
    } else {
        let t = (((n as f64).ln() - delta.ln()) / (1.0 / r).ln()).ceil();
        Some((t as u64).max(1))
    };
    MixingBound { r, t_bound }
}

fn coupling_tanh_sum(model: &IsingModel, x: usize, beta: f64) -> f64 {
    model
        .neighbors(x)
        .map(|(_, j)| (beta * j.abs() / 2.0).tanh())
        .sum()
}

/// `r = max_x (tanh(β q_x / 2) + Σ_y tanh(β |J_xy| / 2))`.
pub fn sca_contraction(model: &IsingModel, pinning: &[f64], beta: f64) -> Result<f64> {
    check_beta(beta)?;
    EngineSpec::sca(pinning.to_vec())?.validate(model)?;
    Ok((0..model.num_vertices())
        .map(|x| (beta * pinning[x] / 2.0).tanh() + coupling_tanh_sum(model, x, beta))
        .fold(0.0, f64::max))
}

/// `r = (1 - ε) + ε max_x Σ_y tanh(β |J_xy| / 2)`.
pub fn epsilon_sca_contraction(model: &IsingModel, epsilon: f64, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    EngineSpec::epsilon_sca(epsilon)?;
    let worst = (0..model.num_vertices())
        .map(|x| coupling_tanh_sum(model, x, beta))
        .fold(0.0, f64::max);
    Ok((1.0 - epsilon) + epsilon * worst)
}

pub fn mixing_bound_sca(model: &IsingModel, pinning: &[f64], beta: f64, delta: f64) -> Result<MixingBound> {
    check_delta(delta)?;
    let r = sca_contraction(model, pinning, beta)?;
    Ok(bound_from_r(model.num_vertices(), r, delta))
}

pub fn mixing_bound_epsilon_sca(model: &IsingModel, epsilon: f64, beta: f64, delta: f64) -> Result<MixingBound> {
    check_delta(delta)?;
    let r = epsilon_sca_contraction(model, epsilon, beta)?;
    Ok(bound_from_r(model.num_vertices(), r, delta))
}

/// Bound for whichever parallel engine `spec` names.
pub fn mixing_bound(model: &IsingModel, spec: &EngineSpec, beta: f64, delta: f64) -> Result<MixingBound> {
    match spec {
        EngineSpec::Sca { pinning } => mixing_bound_sca(model, pinning, beta, delta),
        EngineSpec::EpsilonSca { epsilon } => mixing_bound_epsilon_sca(model, *epsilon, beta, delta),
        EngineSpec::Glauber => Err(Error::Config(
            "mixing-time bounds are available for SCA and ε-SCA only".into(),
        )),
    }
}

/// `½ Σ |p - q|`.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::invalid(format!(
            "distributions have different supports ({} vs {})",
            p.len(),
            q.len()
        )));
    }
    for (name, d) in [("first", p), ("second", q)] {
        let total: f64 = d.iter().sum();
        if (total - 1.0).abs() > 1e-9 || d.iter().any(|&v| v < -1e-15 || !v.is_finite()) {
            return Err(Error::invalid(format!(
                "{name} distribution is not normalized (sum {total})"
            )));
        }
    }
    Ok(tv_unchecked(p, q))
}

fn tv_unchecked(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Stationary law by iterating `μ ← μP` from the uniform distribution until
/// successive iterates are within `1e-13` in total variation.
pub fn stationary_distribution(kernel: &ExactKernel) -> Result<(Vec<f64>, usize)> {
    let m = kernel.num_states();
    let mut mu = vec![1.0 / m as f64; m];
    let pt = kernel.matrix.transpose();
    for it in 1..=STATIONARY_MAX_ITERATIONS {
        let next = &pt * nalgebra::DVector::from_column_slice(&mu);
        let next: Vec<f64> = next.iter().copied().collect();
        let diff = tv_unchecked(&mu, &next);
        mu = next;
        if diff < STATIONARY_TOLERANCE {
            return Ok((mu, it));
        }
    }
    Err(Error::Numerical {
        message: format!(
            "stationary iteration did not converge within {STATIONARY_MAX_ITERATIONS} steps \
             (engine {}, beta {})",
            kernel.engine.label(),
            kernel.beta
        ),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingReport {
    pub engine: String,
    pub beta: f64,
    pub delta: f64,
    pub r: f64,
    pub t_bound: Option<u64>,
    /// `max_σ ‖P^t(σ, ·) - π‖_TV` at `t = t_bound`.
    pub tv_at_bound: Option<f64>,
    pub stationary_iterations: Option<usize>,
    /// `None` when the bound is inapplicable.
    pub passed: Option<bool>,
}

/// Checks the mixing bound against the exact chain: after `t_bound` steps the
/// worst-case distance to stationarity must be at most `δ`.
pub fn verify_mixing(model: &IsingModel, spec: &EngineSpec, beta: f64, delta: f64) -> Result<MixingReport> {
    let n = model.num_vertices();
    if n > VERIFY_MAX {
        return Err(Error::TooLarge {
            what: "mixing verification",
            n,
            cap: VERIFY_MAX,
        });
    }
    let bound = mixing_bound(model, spec, beta, delta)?;
    let mut report = MixingReport {
        engine: spec.label(),
        beta,
        delta,
        r: bound.r,
        t_bound: bound.t_bound,
        tv_at_bound: None,
        stationary_iterations: None,
        passed: None,
    };
    let Some(t) = bound.t_bound else {
        return Ok(report);
    };
    let kernel = build_exact_kernel(model, spec, beta)?;
    let (pi, iterations) = stationary_distribution(&kernel)?;
    let pt = kernel.power(t);
    let worst = (0..pt.nrows())
        .into_par_iter()
        .map(|s| {
            let row: Vec<f64> = pt.row(s).iter().copied().collect();
            tv_unchecked(&row, &pi)
        })
        .reduce(|| 0.0, f64::max);
    report.tv_at_bound = Some(worst);
    report.stationary_iterations = Some(iterations);
    report.passed = Some(worst <= delta);
    Ok(report)
}

/// Expected number of disagreements after one step of the threshold coupling
/// started from `σ` and `σ^x`:
/// `|p(σ,x) - p(σ^x,x)| + Σ_{y ∈ N_x} |p(σ,y) - p(σ^x,y)|`, where `p(·,y)` is
/// the probability that site `y` becomes `+1`.
pub fn coupling_disagreement(
    model: &IsingModel,
    spec: &EngineSpec,
    beta: f64,
    config: &SpinConfiguration,
    x: usize,
) -> Result<f64> {
    if matches!(spec, EngineSpec::Glauber) {
        return Err(Error::Config("coupling is defined for SCA and ε-SCA only".into()));
    }
    check_beta(beta)?;
    spec.validate(model)?;
    if config.len() != model.num_vertices() || x >= model.num_vertices() {
        return Err(Error::invalid("configuration or vertex does not match the model"));
    }
    let flipped = config.flipped(x);
    let up = |c: &SpinConfiguration, y: usize| {
        let cavity = model.cavity_field_of(c.spins(), y);
        spec.site_prob(cavity, c.spin(y), y, beta, 1)
    };
    let own = (up(config, x) - up(&flipped, x)).abs();
    let neighbours: f64 = model
        .neighbors(x)
        .map(|(y, _)| (up(config, y) - up(&flipped, y)).abs())
        .sum();
    Ok(own + neighbours)
}

/// Evolves `μ` through the time-inhomogeneous product of exact kernels at
/// `β_{start}, β_{start+1}, …`, for `steps` steps.
pub fn evolve_exact(
    model: &IsingModel,
    spec: &EngineSpec,
    schedule: &AnnealingSchedule,
    start: u64,
    steps: u64,
    mu: &[f64],
) -> Result<Vec<f64>> {
    let mut mu = mu.to_vec();
    for t in start..start + steps {
        let kernel = build_exact_kernel(model, spec, schedule.beta_at(t)?)?;
        mu = kernel.push_forward(&mu);
    }
    Ok(mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(j: f64) -> IsingModel {
        IsingModel::new(2, [(0, 1, j)], vec![]).unwrap()
    }

    fn triangle(j: f64) -> IsingModel {
        IsingModel::new(3, [(0, 1, j), (1, 2, j), (0, 2, j)], vec![]).unwrap()
    }

    fn esca(eps: f64) -> EngineSpec {
        EngineSpec::epsilon_sca(eps).unwrap()
    }

    #[test]
    fn ground_state_examples() {
        let g = brute_force_ground_states(&pair(1.0)).unwrap();
        assert_eq!(g.min_energy, -1.0);
        assert_eq!(g.states, vec![0b00, 0b11]);

        let g = brute_force_ground_states(&triangle(-1.0)).unwrap();
        assert_eq!(g.min_energy, -1.0);
        assert_eq!(g.count, 6);
        assert_eq!(g.states, vec![1, 2, 3, 4, 5, 6]);

        let single = IsingModel::new(1, [], vec![5.0]).unwrap();
        let g = brute_force_ground_states(&single).unwrap();
        assert_eq!(g.min_energy, -5.0);
        assert_eq!(g.states, vec![1]);
    }

    #[test]
    fn ground_states_refuse_oversized_models() {
        let big = IsingModel::new(31, [(0, 1, 1.0)], vec![]).unwrap();
        assert!(matches!(brute_force_ground_states(&big), Err(Error::TooLarge { cap: 30, .. })));
    }

    #[test]
    fn brute_force_matches_naive_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for n in [4, 9, 13] {
            for with_fields in [false, true] {
                let couplings: Vec<_> = (0..n)
                    .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
                    .map(|(x, y)| (x, y, rng.random_range(-1.0..1.0)))
                    .collect();
                let fields = if with_fields {
                    (0..n).map(|_| rng.random_range(-0.5..0.5)).collect()
                } else {
                    vec![]
                };
                let m = IsingModel::new(n, couplings, fields).unwrap();
                let energies: Vec<f64> = (0..1u64 << n)
                    .map(|i| m.energy(&SpinConfiguration::from_index(i, n)).unwrap())
                    .collect();
                let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
                let argmin: Vec<u64> = (0..1u64 << n).filter(|&i| energies[i as usize] == min).collect();
                let g = brute_force_ground_states(&m).unwrap();
                assert_eq!(g.min_energy, min);
                assert_eq!(g.states, argmin);
            }
        }
    }

    #[test]
    fn sca_kernel_entry() {
        let k = build_exact_kernel(&pair(1.0), &EngineSpec::sca(vec![0.0, 0.0]).unwrap(), 2.0).unwrap();
        let p = 0.880_797_077_977_882_4f64;
        assert!((k.matrix[(3, 3)] - p * p).abs() < 1e-15);
        assert!((k.matrix[(3, 3)] - 0.775_803).abs() < 1e-6);
    }

    #[test]
    fn infinite_temperature_kernels() {
        let m = triangle(-1.0);
        for spec in [EngineSpec::sca(vec![0.7; 3]).unwrap(), esca(1.0)] {
            let k = build_exact_kernel(&m, &spec, 0.0).unwrap();
            assert!(k.matrix.iter().all(|&v| (v - 0.125).abs() < 1e-15));
        }
        let k = build_exact_kernel(&m, &EngineSpec::Glauber, 0.0).unwrap();
        for s in 0..8u64 {
            for t in 0..8u64 {
                if (s ^ t).count_ones() > 1 {
                    assert_eq!(k.matrix[(s as usize, t as usize)], 0.0);
                }
            }
        }
    }

    #[test]
    fn kernel_refuses_large_models() {
        let m = IsingModel::new(13, [(0, 1, 1.0)], vec![]).unwrap();
        assert!(build_exact_kernel(&m, &EngineSpec::Glauber, 1.0).is_err());
    }

    #[test]
    fn sca_bound_examples() {
        let t = triangle(-1.0);
        let b = mixing_bound_sca(&t, &[0.0; 3], 0.0, 0.5).unwrap();
        assert_eq!(b, MixingBound { r: 0.0, t_bound: Some(1) });

        let b = mixing_bound_sca(&t, &[0.0; 3], 0.1, 0.01).unwrap();
        assert!((b.r - 2.0 * 0.05f64.tanh()).abs() < 1e-15);
        assert!((b.r - 0.099_916_8).abs() < 1e-7);
        assert_eq!(b.t_bound, Some(3));

        let b = mixing_bound_sca(&t, &[100.0; 3], 0.1, 0.01).unwrap();
        assert!(b.r >= 1.0);
        assert_eq!(b.t_bound, None);
    }

    #[test]
    fn epsilon_bound_examples() {
        let t = triangle(1.0);
        let b = mixing_bound_epsilon_sca(&t, 0.5, 0.1, 0.01).unwrap();
        assert!((b.r - 0.549_958).abs() < 1e-6);
        assert_eq!(b.t_bound, Some(10));

        let sca = sca_contraction(&t, &[0.0; 3], 0.7).unwrap();
        assert_eq!(epsilon_sca_contraction(&t, 1.0, 0.7).unwrap(), sca);
        for eps in [0.1, 0.5, 0.9] {
            assert_eq!(epsilon_sca_contraction(&t, eps, 0.0).unwrap(), 1.0 - eps);
        }
        assert!(mixing_bound_epsilon_sca(&t, 0.0, 0.1, 0.01).is_err());
        assert!(mixing_bound_epsilon_sca(&t, 0.5, 0.1, 1.0).is_err());
    }

    #[test]
    fn tv_examples() {
        let u = vec![0.25; 4];
        assert_eq!(tv_distance(&u, &u).unwrap(), 0.0);
        assert_eq!(tv_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(tv_distance(&u, &[1.0, 0.0, 0.0, 0.0]).unwrap(), 0.75);
        assert!(tv_distance(&[0.5, 0.6], &[0.5, 0.5]).is_err());
        assert!(tv_distance(&[1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn verify_examples() {
        let t = triangle(-1.0);
        let r = verify_mixing(&t, &esca(0.5), 0.1, 0.01).unwrap();
        assert_eq!(r.t_bound, Some(10));
        assert_eq!(r.passed, Some(true));

        let r = verify_mixing(&t, &EngineSpec::sca(vec![0.0; 3]).unwrap(), 0.0, 0.01).unwrap();
        assert_eq!(r.t_bound, Some(1));
        assert!(r.tv_at_bound.unwrap() < 1e-15);

        let r = verify_mixing(&t, &EngineSpec::sca(vec![100.0; 3]).unwrap(), 0.1, 0.01).unwrap();
        assert_eq!(r.passed, None);
        assert_eq!(r.tv_at_bound, None);
        assert!(verify_mixing(&t, &EngineSpec::Glauber, 0.1, 0.01).is_err());
    }

    #[test]
    fn coupling_examples() {
        let iso = IsingModel::new(3, [(0, 1, 1.0)], vec![]).unwrap();
        let cfg = SpinConfiguration::new(vec![1, -1, 1]).unwrap();
        let d = coupling_disagreement(&iso, &esca(0.3), 2.0, &cfg, 2).unwrap();
        assert!((d - 0.7).abs() < 1e-15);

        let t = triangle(1.0);
        for idx in 0..8 {
            let cfg = SpinConfiguration::from_index(idx, 3);
            for x in 0..3 {
                let d = coupling_disagreement(&t, &esca(0.5), 0.1, &cfg, x).unwrap();
                assert!(d <= 0.549_958 + 1e-6);
            }
        }
        assert!(coupling_disagreement(&t, &EngineSpec::Glauber, 0.1, &SpinConfiguration::all_up(3), 0).is_err());
    }

    #[test]
    fn ground_state_distribution() {
        let g = brute_force_ground_states(&pair(1.0)).unwrap();
        assert_eq!(g.uniform_distribution().unwrap(), vec![0.5, 0.0, 0.0, 0.5]);
        assert!(g.contains(&SpinConfiguration::all_up(2)));
    }
}
