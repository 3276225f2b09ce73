//! Seeded generators for the benchmark instance families.
//!
//! Every generator is a pure function of its parameters and seed. Pairs
//! `x < y` are visited in lexicographic order with one draw each.

mod io;
pub mod tsp;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::IsingModel;

pub use io::{format_instance, parse_instance, read_instance, write_instance};
pub use tsp::{TourDecoding, TspInstance, Violation};

/// Complete-graph instances above this size are refused.
pub const MAX_DENSE_VERTICES: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    GaussianSpinGlass { n: usize },
    BernoulliSpinGlass { n: usize, p: f64 },
    MaxCut { n: usize, p: f64 },
    Tsp { cities: usize },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::GaussianSpinGlass { .. } => "gaussian",
            Family::BernoulliSpinGlass { .. } => "bernoulli",
            Family::MaxCut { .. } => "maxcut",
            Family::Tsp { .. } => "tsp",
        }
    }

    /// Whether every energy of the family is an exact multiple of a power of two,
    /// so ground states can be compared without tolerance.
    pub fn integer_valued(&self) -> bool {
        !matches!(self, Family::GaussianSpinGlass { .. })
    }

    pub fn generate(&self, seed: u64) -> Result<InstanceArtifact> {
        match *self {
            Family::GaussianSpinGlass { n } => gen_gaussian_spin_glass(n, seed),
            Family::BernoulliSpinGlass { n, p } => gen_bernoulli_spin_glass(n, p, seed),
            Family::MaxCut { n, p } => gen_max_cut(n, p, seed),
            Family::Tsp { cities } => gen_tsp(cities, seed),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceMetadata {
    #[serde(flatten)]
    pub family: Family,
    pub seed: u64,
}

/// A generated model together with what is needed to regenerate and decode it.
#[derive(Clone, Debug)]
pub struct InstanceArtifact {
    pub model: IsingModel,
    pub metadata: Option<InstanceMetadata>,
    pub tsp: Option<TspInstance>,
    /// Constant dropped from the encoding (TSP only): `H(σ_T) = B·len(T) - offset`.
    pub energy_offset: f64,
}

impl InstanceArtifact {
    pub fn from_model(model: IsingModel) -> Self {
        InstanceArtifact {
            model,
            metadata: None,
            tsp: None,
            energy_offset: 0.0,
        }
    }

    pub fn family_name(&self) -> &str {
        match &self.metadata {
            Some(m) => m.family.name(),
            None if self.tsp.is_some() => "tsp",
            None => "custom",
        }
    }
}

fn check_size(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::invalid(format!("need N >= {min}, got {n}")));
    }
    if n > MAX_DENSE_VERTICES {
        return Err(Error::TooLarge {
            what: "complete-graph instance generation",
            n,
            cap: MAX_DENSE_VERTICES,
        });
    }
    Ok(())
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::invalid(format!("probability must lie in [0, 1], got {p}")))
    }
}

fn complete_graph<F>(n: usize, seed: u64, mut draw: F) -> Result<IsingModel>
where
    F: FnMut(&mut ChaCha8Rng) -> f64,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut couplings = Vec::with_capacity(n * (n - 1) / 2);
    for x in 0..n {
        for y in x + 1..n {
            couplings.push((x, y, draw(&mut rng)));
        }
    }
    IsingModel::new(n, couplings, vec![])
}

fn artifact(model: IsingModel, family: Family, seed: u64) -> InstanceArtifact {
    InstanceArtifact {
        model,
        metadata: Some(InstanceMetadata { family, seed }),
        tsp: None,
        energy_offset: 0.0,
    }
}

/// Complete graph, `J_xy ~ N(0, 1)` i.i.d., `h = 0`.
pub fn gen_gaussian_spin_glass(n: usize, seed: u64) -> Result<InstanceArtifact> {
    check_size(n, 2)?;
    let model = complete_graph(n, seed, |rng| rng.sample(StandardNormal))?;
    Ok(artifact(model, Family::GaussianSpinGlass { n }, seed))
}

/// Complete graph, `J_xy = +1` with probability `p` and `-1` otherwise, `h = 0`.
pub fn gen_bernoulli_spin_glass(n: usize, p: f64, seed: u64) -> Result<InstanceArtifact> {
    check_size(n, 2)?;
    check_probability(p)?;
    let model = complete_graph(n, seed, |rng| if rng.random::<f64>() < p { 1.0 } else { -1.0 })?;
    Ok(artifact(model, Family::BernoulliSpinGlass { n, p }, seed))
}

/// Erdős–Rényi `G(n, p)` with `J = -1` on edges, `h = 0`.
pub fn gen_max_cut(n: usize, p: f64, seed: u64) -> Result<InstanceArtifact> {
    check_size(n, 2)?;
    check_probability(p)?;
    // Non-edges draw 0, which the model drops.
    let model = complete_graph(n, seed, |rng| if rng.random::<f64>() < p { -1.0 } else { 0.0 })?;
    Ok(artifact(model, Family::MaxCut { n, p }, seed))
}

/// Cut size of a configuration on a max-cut instance: `(|E| - H(σ)) / 2`.
pub fn cut_value(model: &IsingModel, energy: f64) -> f64 {
    (model.num_couplings() as f64 - energy) / 2.0
}

/// Random symmetric distances uniform on `1..=100`, `A = max d`, `B = 1`.
pub fn gen_tsp(cities: usize, seed: u64) -> Result<InstanceArtifact> {
    if cities < 3 {
        return Err(Error::invalid(format!("TSP needs at least 3 cities, got {cities}")));
    }
    if cities.saturating_mul(cities) > MAX_DENSE_VERTICES {
        return Err(Error::TooLarge {
            what: "TSP encoding",
            n: cities * cities,
            cap: MAX_DENSE_VERTICES,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = vec![0u32; cities * cities];
    for i in 0..cities {
        for j in i + 1..cities {
            let v = rng.random_range(1..=tsp::MAX_DISTANCE);
            d[i * cities + j] = v;
            d[j * cities + i] = v;
        }
    }
    let instance = TspInstance::with_default_weights(cities, d)?;
    let (model, offset) = instance.to_ising()?;
    Ok(InstanceArtifact {
        model,
        metadata: Some(InstanceMetadata {
            family: Family::Tsp { cities },
            seed,
        }),
        tsp: Some(instance),
        energy_offset: offset,
    })
}
