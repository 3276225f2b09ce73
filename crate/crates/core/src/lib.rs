//! Simulated annealing of Ising Hamiltonians with three Markov chain engines:
//! single-site Glauber dynamics, fully parallel stochastic cellular automata
//! (SCA) with pinning, and ε-SCA where each site updates with probability ε.
//!
//! Alongside the engines the crate provides seeded benchmark instance
//! generators, exact small-system kernels for checking mixing-time bounds,
//! and a multi-trial benchmarking harness.

pub mod dynamics;
pub mod error;
pub mod exact;
pub mod harness;
pub mod model;
pub mod problems;
pub mod schedule;
pub mod seeds;

pub use dynamics::{anneal, AnnealOptions, ChainState, EngineKind, EngineSpec, TrialRecord};
pub use error::{Error, Result};
pub use model::{IsingModel, SpinConfiguration};
pub use problems::{InstanceArtifact, TspInstance};
pub use schedule::{make_convergent_schedule, AnnealingSchedule};
