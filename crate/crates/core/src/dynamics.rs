//! Glauber, SCA and ε-SCA update rules and the annealing loop that drives them.
//!
//! Every per-site probability is evaluated in logistic form
//! `1 / (1 + e^{-z})`, which is the same quantity as the `e^{z/2} / 2cosh(z/2)`
//! form but never overflows for large `β`.
//!
//! Draw order is fixed: one uniform per vertex, ascending vertex index, for the
//! parallel engines; one site index then one uniform for Glauber. Together
//! with a seeded ChaCha stream this makes trajectories reproducible.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{IsingModel, SpinConfiguration};
use crate::schedule::AnnealingSchedule;

/// Cached cavity fields and energy are recomputed from scratch this often.
const RESYNC_INTERVAL: u64 = 1024;

#[inline]
fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// SCA local probability `p_{x,q}(s | σ)` from the cavity field and current spin.
#[inline]
pub fn sca_prob(cavity: f64, pinning: f64, spin: i8, beta: f64, s: i8) -> f64 {
    logistic(beta * (cavity + pinning * f64::from(spin)) * f64::from(s))
}

/// ε-SCA flip probability `p_x(σ)` before the ε thinning.
#[inline]
pub fn flip_prob(cavity: f64, spin: i8, beta: f64) -> f64 {
    logistic(-beta * cavity * f64::from(spin))
}

/// ε-SCA local law `(1-ε) δ_{σ_x,s} + ε p_{x,0}(s | σ)`.
#[inline]
pub fn epsilon_sca_prob(cavity: f64, spin: i8, epsilon: f64, beta: f64, s: i8) -> f64 {
    let keep = if spin == s { 1.0 - epsilon } else { 0.0 };
    keep + epsilon * sca_prob(cavity, 0.0, spin, beta, s)
}

/// Heat-bath probability `e^{β h̃ s} / 2cosh(β h̃)` of setting the chosen spin to `s`.
#[inline]
pub fn heat_bath_prob(cavity: f64, beta: f64, s: i8) -> f64 {
    logistic(2.0 * (beta * cavity) * f64::from(s))
}

fn check_site(model: &IsingModel, config: &SpinConfiguration, x: usize, beta: f64) -> Result<()> {
    if config.len() != model.num_vertices() {
        return Err(Error::invalid(format!(
            "configuration has {} spins, model has {}",
            config.len(),
            model.num_vertices()
        )));
    }
    if x >= model.num_vertices() {
        return Err(Error::invalid(format!("vertex {x} out of range")));
    }
    if !(beta >= 0.0) {
        return Err(Error::invalid(format!("beta must be nonnegative, got {beta}")));
    }
    Ok(())
}

fn check_spin(s: i8) -> Result<()> {
    if s == 1 || s == -1 {
        Ok(())
    } else {
        Err(Error::invalid(format!("target spin must be ±1, got {s}")))
    }
}

pub fn sca_local_prob(
    model: &IsingModel,
    config: &SpinConfiguration,
    x: usize,
    pinning: f64,
    beta: f64,
    s: i8,
) -> Result<f64> {
    check_site(model, config, x, beta)?;
    check_spin(s)?;
    if !(pinning >= 0.0) {
        return Err(Error::invalid(format!("pinning must be nonnegative, got {pinning}")));
    }
    let cavity = model.cavity_field_of(config.spins(), x);
    Ok(sca_prob(cavity, pinning, config.spin(x), beta, s))
}

pub fn epsilon_sca_flip_prob(
    model: &IsingModel,
    config: &SpinConfiguration,
    x: usize,
    beta: f64,
) -> Result<f64> {
    check_site(model, config, x, beta)?;
    let cavity = model.cavity_field_of(config.spins(), x);
    Ok(flip_prob(cavity, config.spin(x), beta))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineKind {
    Glauber,
    Sca,
    EpsilonSca,
}

/// Which dynamics to run, with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EngineSpec {
    Glauber,
    Sca { pinning: Vec<f64> },
    EpsilonSca { epsilon: f64 },
}

impl EngineSpec {
    pub fn sca(pinning: Vec<f64>) -> Result<Self> {
        if let Some(x) = pinning.iter().position(|&q| !(q >= 0.0) || !q.is_finite()) {
            return Err(Error::Config(format!(
                "SCA pinning q_{x} = {} must be finite and nonnegative",
                pinning[x]
            )));
        }
        Ok(EngineSpec::Sca { pinning })
    }

    pub fn epsilon_sca(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::Config(format!("epsilon must lie in (0, 1], got {epsilon}")));
        }
        Ok(EngineSpec::EpsilonSca { epsilon })
    }

    pub fn kind(&self) -> EngineKind {
        match self {
            EngineSpec::Glauber => EngineKind::Glauber,
            EngineSpec::Sca { .. } => EngineKind::Sca,
            EngineSpec::EpsilonSca { .. } => EngineKind::EpsilonSca,
        }
    }

    /// Checks parameters against the model they will run on.
    pub fn validate(&self, model: &IsingModel) -> Result<()> {
        match self {
            EngineSpec::Glauber => Ok(()),
            EngineSpec::Sca { pinning } => {
                if pinning.len() != model.num_vertices() {
                    return Err(Error::Config(format!(
                        "SCA needs {} pinning values, got {}",
                        model.num_vertices(),
                        pinning.len()
                    )));
                }
                EngineSpec::sca(pinning.clone()).map(|_| ())
            }
            EngineSpec::EpsilonSca { epsilon } => EngineSpec::epsilon_sca(*epsilon).map(|_| ()),
        }
    }

    /// Stable short name, also used to derive per-trial seeds.
    pub fn label(&self) -> String {
        match self {
            EngineSpec::Glauber => "glauber".to_string(),
            EngineSpec::Sca { pinning } => match pinning.first() {
                Some(&q) if pinning.iter().all(|&p| p == q) => format!("sca(q={q})"),
                _ => "sca(q=custom)".to_string(),
            },
            EngineSpec::EpsilonSca { epsilon } => format!("esca(eps={epsilon})"),
        }
    }

    /// Probability that site `x` takes spin `s` in one application of the
    /// kernel, given that `x` is the updated site for Glauber.
    pub fn site_prob(&self, cavity: f64, spin: i8, x: usize, beta: f64, s: i8) -> f64 {
        match self {
            EngineSpec::Glauber => heat_bath_prob(cavity, beta, s),
            EngineSpec::Sca { pinning } => sca_prob(cavity, pinning[x], spin, beta, s),
            EngineSpec::EpsilonSca { epsilon } => epsilon_sca_prob(cavity, spin, *epsilon, beta, s),
        }
    }
}

/// A running chain: configuration, cached cavity fields and energy, RNG and step count.
#[derive(Clone, Debug)]
pub struct ChainState {
    config: SpinConfiguration,
    cavity: Vec<f64>,
    energy: f64,
    rng: ChaCha8Rng,
    step_index: u64,
    pending: Vec<usize>,
}

impl ChainState {
    pub fn new(model: &IsingModel, config: SpinConfiguration, seed: u64) -> Result<Self> {
        let energy = model.energy(&config)?;
        Ok(ChainState {
            cavity: model.cavity_fields_of(config.spins()),
            config,
            energy,
            rng: ChaCha8Rng::seed_from_u64(seed),
            step_index: 0,
            pending: Vec::new(),
        })
    }

    /// Starts from a uniformly random configuration drawn from the chain's own stream.
    pub fn random(model: &IsingModel, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let config = SpinConfiguration::random(model.num_vertices(), &mut rng);
        ChainState {
            cavity: model.cavity_fields_of(config.spins()),
            energy: model.energy_of(config.spins()),
            config,
            rng,
            step_index: 0,
            pending: Vec::new(),
        }
    }

    pub fn config(&self) -> &SpinConfiguration {
        &self.config
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn step_index(&self) -> u64 {
        self.step_index
    }

    pub fn cavity_field(&self, x: usize) -> f64 {
        self.cavity[x]
    }

    /// Recomputes cached cavity fields and energy from the configuration.
    pub fn resync(&mut self, model: &IsingModel) {
        self.cavity = model.cavity_fields_of(self.config.spins());
        self.energy = model.energy_of(self.config.spins());
    }

    fn flip_site(&mut self, model: &IsingModel, x: usize) {
        let spins = self.config.spins_mut();
        let old = f64::from(spins[x]);
        self.energy += 2.0 * old * self.cavity[x];
        spins[x] = -spins[x];
        let change = -2.0 * old;
        for (y, j) in model.neighbors(x) {
            self.cavity[y] += j * change;
        }
    }

    /// Commits the flips chosen from the previous configuration.
    fn commit_pending(&mut self, model: &IsingModel) {
        let pending = std::mem::take(&mut self.pending);
        for &x in &pending {
            self.flip_site(model, x);
        }
        self.pending = pending;
        self.pending.clear();
        self.step_index += 1;
    }

    /// One SCA update: every site resamples independently from `p_{x,q_x}(· | σ)`.
    pub fn sca_step(&mut self, model: &IsingModel, pinning: &[f64], beta: f64) {
        debug_assert!(beta >= 0.0);
        debug_assert_eq!(pinning.len(), model.num_vertices());
        self.pending.clear();
        let spins = self.config.spins();
        for x in 0..spins.len() {
            let up = sca_prob(self.cavity[x], pinning[x], spins[x], beta, 1);
            let u: f64 = self.rng.random();
            let new = if u < up { 1 } else { -1 };
            if new != spins[x] {
                self.pending.push(x);
            }
        }
        self.commit_pending(model);
    }

    /// One ε-SCA update: each site flips independently with probability `ε p_x(σ)`.
    pub fn epsilon_sca_step(&mut self, model: &IsingModel, epsilon: f64, beta: f64) {
        debug_assert!(beta >= 0.0 && epsilon > 0.0 && epsilon <= 1.0);
        self.pending.clear();
        let spins = self.config.spins();
        for x in 0..spins.len() {
            let p = epsilon * flip_prob(self.cavity[x], spins[x], beta);
            let u: f64 = self.rng.random();
            if u < p {
                self.pending.push(x);
            }
        }
        self.commit_pending(model);
    }

    /// One Glauber update: a uniformly chosen site is heat-bath resampled.
    pub fn glauber_step(&mut self, model: &IsingModel, beta: f64) {
        debug_assert!(beta >= 0.0);
        let n = model.num_vertices();
        let x = self.rng.random_range(0..n);
        let up = heat_bath_prob(self.cavity[x], beta, 1);
        let u: f64 = self.rng.random();
        let new = if u < up { 1 } else { -1 };
        if new != self.config.spin(x) {
            self.flip_site(model, x);
        }
        self.step_index += 1;
    }

    pub fn step(&mut self, model: &IsingModel, spec: &EngineSpec, beta: f64) {
        match spec {
            EngineSpec::Glauber => self.glauber_step(model, beta),
            EngineSpec::Sca { pinning } => self.sca_step(model, pinning, beta),
            EngineSpec::EpsilonSca { epsilon } => self.epsilon_sca_step(model, *epsilon, beta),
        }
        if self.step_index % RESYNC_INTERVAL == 0 {
            self.resync(model);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnealOptions {
    pub num_steps: u64,
    /// Kernel applications per schedule step, all at the same `β_t`.
    pub sweeps_per_step: u32,
    pub record_trace: bool,
}

impl AnnealOptions {
    pub fn steps(num_steps: u64) -> Self {
        AnnealOptions {
            num_steps,
            sweeps_per_step: 1,
            record_trace: false,
        }
    }
}

/// Outcome of one annealing run.
#[derive(Clone, Debug, Serialize)]
pub struct TrialRecord {
    pub engine: String,
    pub schedule: AnnealingSchedule,
    pub seed: u64,
    /// Exact energy of `best_config`.
    pub min_energy: f64,
    pub best_config: SpinConfiguration,
    /// 0 for the initial configuration, `k` after the `k`-th schedule step.
    pub best_step: u64,
    pub final_config: SpinConfiguration,
    pub final_energy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<f64>>,
    #[serde(skip)]
    pub duration: Duration,
}

/// Runs one annealing trial from a uniformly random start.
///
/// Schedule step `k` (zero based) uses `β` at `t = first_step + k`, so the
/// logarithmic schedule starts at `t = 1`. The first-visited minimum wins ties.
pub fn anneal(
    model: &IsingModel,
    spec: &EngineSpec,
    schedule: &AnnealingSchedule,
    options: &AnnealOptions,
    seed: u64,
) -> Result<TrialRecord> {
    if options.num_steps == 0 {
        return Err(Error::Config("num_steps must be at least 1".into()));
    }
    if options.sweeps_per_step == 0 {
        return Err(Error::Config("sweeps_per_step must be at least 1".into()));
    }
    spec.validate(model)?;
    let started = Instant::now();
    let mut chain = ChainState::random(model, seed);
    let mut best_energy = chain.energy();
    let mut best_config = chain.config().clone();
    let mut best_step = 0;
    let mut trace = options
        .record_trace
        .then(|| Vec::with_capacity(options.num_steps as usize + 1));
    if let Some(t) = trace.as_mut() {
        t.push(chain.energy());
    }

    let first = schedule.first_step();
    for k in 0..options.num_steps {
        let beta = schedule.beta_at(first + k)?;
        for _ in 0..options.sweeps_per_step {
            chain.step(model, spec, beta);
            if chain.energy() < best_energy {
                best_energy = chain.energy();
                best_config.spins_mut().copy_from_slice(chain.config().spins());
                best_step = k + 1;
            }
        }
        if let Some(t) = trace.as_mut() {
            t.push(chain.energy());
        }
    }

    let final_config = chain.config().clone();
    Ok(TrialRecord {
        engine: spec.label(),
        schedule: *schedule,
        seed,
        min_energy: model.energy_of(best_config.spins()),
        best_config,
        best_step,
        final_energy: model.energy_of(final_config.spins()),
        final_config,
        trace,
        duration: started.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pair(j: f64) -> IsingModel {
        IsingModel::new(2, [(0, 1, j)], vec![]).unwrap()
    }

    fn cfg(s: &[i8]) -> SpinConfiguration {
        SpinConfiguration::new(s.to_vec()).unwrap()
    }

    /// `1 / (1 + e^{-2})`, evaluated to 20 digits offline.
    const P_880797: f64 = 0.880_797_077_977_882_4;

    #[test]
    fn sca_local_prob_examples() {
        let m = pair(1.0);
        let s = cfg(&[1, 1]);
        assert_eq!(sca_local_prob(&m, &s, 0, 3.0, 0.0, 1).unwrap(), 0.5);
        assert_eq!(sca_local_prob(&m, &s, 0, 3.0, 0.0, -1).unwrap(), 0.5);
        // h̃_0 = 1, q = 0, β = 2
        let p = sca_local_prob(&m, &s, 0, 0.0, 2.0, 1).unwrap();
        assert!((p - P_880797).abs() < 1e-15);
        let mut last = 0.0;
        for beta in [1.0, 5.0, 20.0, 100.0, 1e6] {
            let p = sca_local_prob(&m, &s, 0, 0.5, beta, 1).unwrap();
            assert!(p >= last && p <= 1.0);
            last = p;
        }
        assert_eq!(last, 1.0);
        assert!(sca_local_prob(&m, &s, 0, -1.0, 1.0, 1).is_err());
        assert!(sca_local_prob(&m, &s, 0, 0.0, -1.0, 1).is_err());
        assert!(sca_local_prob(&m, &s, 0, 0.0, 1.0, 0).is_err());
    }

    #[test]
    fn epsilon_flip_prob_examples() {
        let m = pair(1.0);
        let s = cfg(&[1, 1]);
        assert_eq!(epsilon_sca_flip_prob(&m, &s, 0, 0.0).unwrap(), 0.5);
        let p = epsilon_sca_flip_prob(&m, &s, 0, 2.0).unwrap();
        assert!((p - (1.0 - P_880797)).abs() < 1e-15);
        assert!((p - 0.119_203).abs() < 1e-6);
        assert!(epsilon_sca_flip_prob(&m, &s, 0, 1e4).unwrap() < 1e-300);
        assert!((0.5 * p - 0.059_601_5).abs() < 1e-7);
        let q0 = sca_local_prob(&m, &s, 0, 0.0, 2.0, -1).unwrap();
        assert_eq!(p, q0);
    }

    #[test]
    fn extreme_beta_never_produces_nan() {
        for beta in [0.0, 1e-300, 1.0, 1e10, 1e300, f64::MAX] {
            for cavity in [-5.0, 0.0, 5.0] {
                for spin in [-1, 1] {
                    assert!(!sca_prob(cavity, 1.0, spin, beta, 1).is_nan());
                    assert!(!flip_prob(cavity, spin, beta).is_nan());
                    assert!(!heat_bath_prob(cavity, beta, 1).is_nan());
                }
            }
        }
    }

    #[test]
    fn zero_temperature_moves_are_uniform() {
        let m = pair(1.0);
        let mut counts = [0u32; 4];
        for seed in 0..4000 {
            let mut chain = ChainState::new(&m, cfg(&[1, 1]), seed).unwrap();
            chain.sca_step(&m, &[0.0, 0.0], 0.0);
            counts[chain.config().to_index() as usize] += 1;
        }
        // Each of 4 outcomes has p = 1/4; 4σ band on 4000 draws is ±110.
        for c in counts {
            assert!((c as i64 - 1000).abs() < 110, "{counts:?}");
        }
    }

    #[test]
    fn huge_pinning_freezes_sca() {
        let m = pair(1.0);
        let mut chain = ChainState::new(&m, cfg(&[1, -1]), 9).unwrap();
        for _ in 0..1000 {
            chain.sca_step(&m, &[1e6, 1e6], 1.0);
        }
        assert_eq!(chain.config(), &cfg(&[1, -1]));
    }

    #[test]
    fn single_site_heat_bath_probability() {
        let m = IsingModel::new(1, [], vec![1.0]).unwrap();
        let p = heat_bath_prob(m.field(0), 1.0, 1);
        let e = std::f64::consts::E;
        assert!((p - e / (e + 1.0 / e)).abs() < 1e-15);
        assert!((p - P_880797).abs() < 1e-15);
    }

    #[test]
    fn glauber_changes_at_most_one_site() {
        let m = IsingModel::new(
            6,
            (0..6).flat_map(|x| (x + 1..6).map(move |y| (x, y, if (x + y) % 2 == 0 { 1.0 } else { -0.7 }))),
            vec![],
        )
        .unwrap();
        let mut chain = ChainState::random(&m, 5);
        for beta in [0.0, 0.5, 3.0] {
            for _ in 0..500 {
                let before = chain.config().clone();
                chain.glauber_step(&m, beta);
                assert!(before.hamming(chain.config()) <= 1);
            }
        }
    }

    #[test]
    fn epsilon_near_zero_keeps_configuration() {
        let m = pair(-1.0);
        let mut chain = ChainState::new(&m, cfg(&[1, 1]), 3).unwrap();
        for _ in 0..1000 {
            chain.epsilon_sca_step(&m, 1e-12, 0.0);
        }
        assert_eq!(chain.config(), &cfg(&[1, 1]));
    }

    #[test]
    fn cached_fields_stay_consistent() {
        let m = IsingModel::new(
            8,
            (0..8).flat_map(|x| (x + 1..8).map(move |y| (x, y, ((x * 7 + y * 3) % 5) as f64 - 2.0))),
            vec![0.5, -0.5, 0.0, 1.0, 0.0, 0.0, -1.0, 0.25],
        )
        .unwrap();
        let specs = [
            EngineSpec::Glauber,
            EngineSpec::sca(vec![0.3; 8]).unwrap(),
            EngineSpec::epsilon_sca(0.4).unwrap(),
        ];
        for spec in &specs {
            let mut chain = ChainState::random(&m, 11);
            for k in 0..300 {
                chain.step(&m, spec, 0.01 * k as f64);
                assert!((chain.energy() - m.energy(chain.config()).unwrap()).abs() < 1e-9);
                for x in 0..8 {
                    let direct = m.cavity_field(chain.config(), x).unwrap();
                    assert!((chain.cavity_field(x) - direct).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn engine_spec_validation() {
        assert!(EngineSpec::epsilon_sca(0.0).is_err());
        assert!(EngineSpec::epsilon_sca(1.5).is_err());
        assert!(EngineSpec::epsilon_sca(1.0).is_ok());
        assert!(EngineSpec::sca(vec![-0.1]).is_err());
        let m = pair(1.0);
        let wrong = EngineSpec::Sca { pinning: vec![0.5] };
        assert!(matches!(wrong.validate(&m), Err(Error::Config(_))));
        assert_eq!(EngineSpec::epsilon_sca(0.5).unwrap().label(), "esca(eps=0.5)");
        assert_eq!(EngineSpec::sca(vec![0.5, 0.5]).unwrap().label(), "sca(q=0.5)");
    }

    #[test]
    fn anneal_single_step_minimum() {
        let m = pair(1.0);
        let sched = AnnealingSchedule::constant(1e-300).unwrap();
        for spec in [EngineSpec::Glauber, EngineSpec::epsilon_sca(1.0).unwrap()] {
            for seed in 0..50 {
                let opts = AnnealOptions {
                    num_steps: 1,
                    sweeps_per_step: 1,
                    record_trace: true,
                };
                let rec = anneal(&m, &spec, &sched, &opts, seed).unwrap();
                let trace = rec.trace.as_ref().unwrap();
                assert_eq!(trace.len(), 2);
                assert_eq!(rec.min_energy, trace[0].min(trace[1]));
                let init = ChainState::random(&m, seed);
                assert_eq!(init.energy(), trace[0]);
                if trace[1] < trace[0] {
                    assert_eq!(rec.best_step, 1);
                } else {
                    assert_eq!(rec.best_step, 0);
                    assert_eq!(&rec.best_config, init.config());
                }
            }
        }
    }

    #[test]
    fn anneal_ferromagnetic_pair_finds_ground_state() {
        let m = pair(1.0);
        let sched = AnnealingSchedule::benchmark_default();
        let specs = [
            EngineSpec::Glauber,
            EngineSpec::sca(vec![0.5, 0.5]).unwrap(),
            EngineSpec::epsilon_sca(0.5).unwrap(),
            EngineSpec::epsilon_sca(1.0).unwrap(),
        ];
        for spec in &specs {
            let hits = (0..100)
                .filter(|&seed| {
                    anneal(&m, spec, &sched, &AnnealOptions::steps(1000), seed)
                        .unwrap()
                        .min_energy
                        == -1.0
                })
                .count();
            assert!(hits >= 99, "{} reached the ground state {hits}/100 times", spec.label());
        }
    }

    #[test]
    fn anneal_is_deterministic() {
        let m = IsingModel::new(5, [(0, 1, 1.0), (1, 2, -1.0), (2, 3, 0.5), (3, 4, -2.0), (0, 4, 1.5)], vec![])
            .unwrap();
        let sched = AnnealingSchedule::benchmark_default();
        let spec = EngineSpec::epsilon_sca(0.6).unwrap();
        let opts = AnnealOptions {
            num_steps: 2000,
            sweeps_per_step: 1,
            record_trace: true,
        };
        let a = anneal(&m, &spec, &sched, &opts, 42).unwrap();
        let b = anneal(&m, &spec, &sched, &opts, 42).unwrap();
        assert_eq!(a.min_energy, b.min_energy);
        assert_eq!(a.best_config, b.best_config);
        assert_eq!(a.best_step, b.best_step);
        assert_eq!(a.final_config, b.final_config);
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn anneal_rejects_zero_steps() {
        let m = pair(1.0);
        let sched = AnnealingSchedule::benchmark_default();
        assert!(anneal(&m, &EngineSpec::Glauber, &sched, &AnnealOptions::steps(0), 1).is_err());
    }

    #[test]
    fn logarithmic_schedule_starts_at_one() {
        let m = pair(1.0);
        let sched = AnnealingSchedule::logarithmic(3.0).unwrap();
        let rec = anneal(&m, &EngineSpec::epsilon_sca(0.5).unwrap(), &sched, &AnnealOptions::steps(10), 1);
        assert!(rec.is_ok());
    }

    proptest! {
        #[test]
        fn local_probabilities_normalize(cavity in -50.0f64..50.0, q in 0.0f64..20.0, beta in 0.0f64..10.0,
                                         spin in prop::sample::select(vec![-1i8, 1]), eps in 1e-6f64..1.0) {
            let up = sca_prob(cavity, q, spin, beta, 1);
            let down = sca_prob(cavity, q, spin, beta, -1);
            prop_assert!((up + down - 1.0).abs() <= 1e-14);
            let up = epsilon_sca_prob(cavity, spin, eps, beta, 1);
            let down = epsilon_sca_prob(cavity, spin, eps, beta, -1);
            prop_assert!((up + down - 1.0).abs() <= 1e-14);
            let up = heat_bath_prob(cavity, beta, 1);
            let down = heat_bath_prob(cavity, beta, -1);
            prop_assert!((up + down - 1.0).abs() <= 1e-14);
        }

        #[test]
        fn pinning_raises_stay_probability(cavity in -20.0f64..20.0, q1 in 0.0f64..10.0, dq in 0.0f64..10.0,
                                           beta in 0.0f64..5.0, spin in prop::sample::select(vec![-1i8, 1])) {
            let stay1 = sca_prob(cavity, q1, spin, beta, spin);
            let stay2 = sca_prob(cavity, q1 + dq, spin, beta, spin);
            prop_assert!(stay2 >= stay1);
        }
    }
}
