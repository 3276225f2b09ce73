//! Cooling schedules `t ↦ β_t`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::IsingModel;

/// `β₀ = α = 10⁻³`, the exponential schedule used in the benchmark protocol.
pub const DEFAULT_BETA0: f64 = 1e-3;
pub const DEFAULT_ALPHA: f64 = 1e-3;

/// Tolerance when comparing pinning values against `λ/2`.
pub const PINNING_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnnealingSchedule {
    /// `β_t = β₀ e^{αt}`.
    Exponential { beta0: f64, alpha: f64 },
    /// `β_t = log(t) / Γ`, defined for `t ≥ 1`.
    Logarithmic { gamma_total: f64 },
    Constant { beta0: f64 },
}

impl AnnealingSchedule {
    pub fn exponential(beta0: f64, alpha: f64) -> Result<Self> {
        positive("beta0", beta0)?;
        positive("alpha", alpha)?;
        Ok(AnnealingSchedule::Exponential { beta0, alpha })
    }

    pub fn logarithmic(gamma_total: f64) -> Result<Self> {
        positive("gamma_total", gamma_total)?;
        Ok(AnnealingSchedule::Logarithmic { gamma_total })
    }

    pub fn constant(beta0: f64) -> Result<Self> {
        positive("beta0", beta0)?;
        Ok(AnnealingSchedule::Constant { beta0 })
    }

    /// The exponential schedule with `β₀ = α = 10⁻³`.
    pub fn benchmark_default() -> Self {
        AnnealingSchedule::Exponential {
            beta0: DEFAULT_BETA0,
            alpha: DEFAULT_ALPHA,
        }
    }

    /// First admissible step index: 1 for the logarithmic schedule, 0 otherwise.
    pub fn first_step(&self) -> u64 {
        match self {
            AnnealingSchedule::Logarithmic { .. } => 1,
            _ => 0,
        }
    }

    pub fn beta_at(&self, t: u64) -> Result<f64> {
        match *self {
            AnnealingSchedule::Exponential { beta0, alpha } => Ok(beta0 * (alpha * t as f64).exp()),
            AnnealingSchedule::Logarithmic { gamma_total } => {
                if t == 0 {
                    return Err(Error::invalid("logarithmic schedule is undefined at t = 0"));
                }
                Ok((t as f64).ln() / gamma_total)
            }
            AnnealingSchedule::Constant { beta0 } => Ok(beta0),
        }
    }

    pub fn label(&self) -> String {
        match self {
            AnnealingSchedule::Exponential { beta0, alpha } => format!("exp(beta0={beta0},alpha={alpha})"),
            AnnealingSchedule::Logarithmic { gamma_total } => format!("log(gamma={gamma_total})"),
            AnnealingSchedule::Constant { beta0 } => format!("const(beta0={beta0})"),
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Vertices whose pinning is below the sufficient bound `λ/2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PinningWarning {
    pub vertex: usize,
    pub pinning: f64,
    pub required: f64,
}

/// A logarithmic schedule assembled from a model and its pinning vector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergentSchedule {
    pub schedule: AnnealingSchedule,
    pub lambda: f64,
    pub gamma_total: f64,
    pub warnings: Vec<PinningWarning>,
}

/// Builds `β_t = log(t)/Γ` with `Γ = Σ_x (q_x + |h_x| + Σ_y |J_xy|)`.
///
/// Pinning below `λ/2` is reported through `warnings` (and the log) but does
/// not prevent construction; the bound is only sufficient.
pub fn make_convergent_schedule(model: &IsingModel, pinning: &[f64]) -> Result<ConvergentSchedule> {
    let lambda = model.largest_eigenvalue()?;
    let gamma_total = model.gamma(pinning)?;
    if !gamma_total.is_finite() {
        return Err(Error::invalid(format!("Γ = {gamma_total} is not finite")));
    }
    let required = lambda / 2.0;
    let warnings: Vec<PinningWarning> = pinning
        .iter()
        .enumerate()
        .filter(|&(_, &q)| q < required - PINNING_TOLERANCE)
        .map(|(vertex, &pinning)| PinningWarning {
            vertex,
            pinning,
            required,
        })
        .collect();
    if !warnings.is_empty() {
        log::warn!(
            "{} of {} pinning values are below λ/2 = {required}; convergence is not guaranteed",
            warnings.len(),
            pinning.len()
        );
    }
    Ok(ConvergentSchedule {
        schedule: AnnealingSchedule::logarithmic(gamma_total)?,
        lambda,
        gamma_total,
        warnings,
    })
}

/// Homogeneous pinning `q_x = λ/2`.
pub fn default_pinning(model: &IsingModel) -> Result<Vec<f64>> {
    let lambda = model.largest_eigenvalue()?;
    Ok(vec![(lambda / 2.0).max(0.0); model.num_vertices()])
}
