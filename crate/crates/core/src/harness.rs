//! Multi-trial benchmarking: independent annealing runs per engine on one
//! fixed instance, aggregated into histograms and success rates.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{anneal, AnnealOptions, EngineSpec, TrialRecord};
use crate::error::{Error, Result};
use crate::exact::{brute_force_ground_states, BRUTE_FORCE_MAX};
use crate::problems::{InstanceArtifact, InstanceMetadata};
use crate::schedule::AnnealingSchedule;
use crate::seeds::trial_seed;

pub const DEFAULT_BINS: usize = 50;
/// Relative ground-state tolerance for real-valued couplings.
pub const GAUSSIAN_RELATIVE_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceSource {
    /// Exhaustive enumeration.
    Oracle,
    Supplied,
    /// Best energy observed across all runs; not a certified ground state.
    Empirical,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Reference {
    pub value: f64,
    pub provenance: ReferenceSource,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ReferenceRequest {
    Oracle,
    Supplied(f64),
    Empirical,
    None,
}

/// How close to the reference a trial must get to count as a success.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum SuccessTolerance {
    Exact,
    Relative(f64),
    Absolute(f64),
}

impl SuccessTolerance {
    /// Exact for integer-valued families, relative `1e-6` otherwise.
    pub fn for_instance(instance: &InstanceArtifact) -> Self {
        let integer = match &instance.metadata {
            Some(m) => m.family.integer_valued(),
            None => {
                let model = &instance.model;
                model.couplings().all(|(_, _, j)| (4.0 * j).fract() == 0.0)
                    && model.fields().iter().all(|h| (4.0 * h).fract() == 0.0)
            }
        };
        if integer {
            SuccessTolerance::Exact
        } else {
            SuccessTolerance::Relative(GAUSSIAN_RELATIVE_TOLERANCE)
        }
    }

    pub fn absolute(&self, reference: f64) -> f64 {
        match *self {
            SuccessTolerance::Exact => 0.0,
            SuccessTolerance::Relative(r) => r * reference.abs(),
            SuccessTolerance::Absolute(a) => a,
        }
    }
}

/// Fraction of trials whose minimum energy is within `tolerance` of the reference.
pub fn success_rate(records: &[TrialRecord], reference_min: f64, tolerance: f64) -> Result<f64> {
    success_rate_of(records.iter().map(|r| r.min_energy), reference_min, tolerance)
}

fn success_rate_of<I: ExactSizeIterator<Item = f64>>(energies: I, reference: f64, tolerance: f64) -> Result<f64> {
    if !(tolerance >= 0.0) {
        return Err(Error::invalid(format!("tolerance must be nonnegative, got {tolerance}")));
    }
    let total = energies.len();
    if total == 0 {
        return Err(Error::invalid("success rate of an empty trial set"));
    }
    let hits = energies.filter(|&e| e <= reference + tolerance).count();
    Ok(hits as f64 / total as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyHistogram {
    /// `bins + 1` ascending edges; the last bin is closed on the right.
    pub edges: Vec<f64>,
    pub engines: Vec<String>,
    /// `counts[e][b]` for engine `e`, bin `b`.
    pub counts: Vec<Vec<u64>>,
}

impl EnergyHistogram {
    /// Uniform bins over `range`, or over the pooled observed range.
    pub fn build(series: &[(String, Vec<f64>)], bins: usize, range: Option<(f64, f64)>) -> Result<Self> {
        if bins == 0 {
            return Err(Error::invalid("histogram needs at least one bin"));
        }
        let (lo, hi) = match range {
            Some((lo, hi)) if lo <= hi => (lo, hi),
            Some((lo, hi)) => return Err(Error::invalid(format!("bad histogram range [{lo}, {hi}]"))),
            None => series
                .iter()
                .flat_map(|(_, v)| v.iter().copied())
                .fold(None, |acc: Option<(f64, f64)>, e| match acc {
                    None => Some((e, e)),
                    Some((lo, hi)) => Some((lo.min(e), hi.max(e))),
                })
                .unwrap_or((0.0, 0.0)),
        };
        let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
        let edges: Vec<f64> = (0..=bins)
            .map(|k| if k == bins && hi > lo { hi } else { lo + width * k as f64 })
            .collect();
        let counts = series
            .iter()
            .map(|(_, values)| {
                let mut c = vec![0u64; bins];
                for &e in values {
                    if e < lo || e > edges[bins] {
                        continue;
                    }
                    let k = (((e - lo) / width).floor() as usize).min(bins - 1);
                    c[k] += 1;
                }
                c
            })
            .collect();
        Ok(EnergyHistogram {
            edges,
            engines: series.iter().map(|(name, _)| name.clone()).collect(),
            counts,
        })
    }

    pub fn total(&self, engine: usize) -> u64 {
        self.counts[engine].iter().sum()
    }
}

#[derive(Clone, Debug)]
pub struct BenchmarkConfig {
    pub engines: Vec<EngineSpec>,
    pub schedule: AnnealingSchedule,
    pub trials: usize,
    pub anneal: AnnealOptions,
    pub seed: u64,
    pub tolerance: SuccessTolerance,
    pub bins: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct EngineResult {
    pub engine: EngineSpec,
    pub label: String,
    pub records: Vec<TrialRecord>,
    pub success_rate: Option<f64>,
}

impl EngineResult {
    pub fn min_energy(&self) -> f64 {
        self.records.iter().map(|r| r.min_energy).fold(f64::INFINITY, f64::min)
    }

    pub fn mean_energy(&self) -> f64 {
        self.records.iter().map(|r| r.min_energy).sum::<f64>() / self.records.len() as f64
    }
}

#[derive(Clone, Debug)]
pub struct BenchmarkResult {
    pub config: BenchmarkConfig,
    pub family: String,
    pub metadata: Option<InstanceMetadata>,
    pub num_vertices: usize,
    pub num_couplings: usize,
    pub engines: Vec<EngineResult>,
    pub reference: Option<Reference>,
    pub histogram: EnergyHistogram,
}

fn resolve_reference(
    instance: &InstanceArtifact,
    request: ReferenceRequest,
    observed: impl Iterator<Item = f64>,
) -> Result<Option<Reference>> {
    Ok(match request {
        ReferenceRequest::None => None,
        ReferenceRequest::Supplied(value) => Some(Reference {
            value,
            provenance: ReferenceSource::Supplied,
        }),
        ReferenceRequest::Oracle => {
            let n = instance.model.num_vertices();
            if n > BRUTE_FORCE_MAX {
                return Err(Error::Config(format!(
                    "oracle reference needs N <= {BRUTE_FORCE_MAX}, instance has N = {n}"
                )));
            }
            Some(Reference {
                value: brute_force_ground_states(&instance.model)?.min_energy,
                provenance: ReferenceSource::Oracle,
            })
        }
        ReferenceRequest::Empirical => {
            let best = observed.fold(f64::INFINITY, f64::min);
            best.is_finite().then_some(Reference {
                value: best,
                provenance: ReferenceSource::Empirical,
            })
        }
    })
}

/// Runs `trials` seeded anneals for one engine, in trial order.
pub fn run_trials(
    instance: &InstanceArtifact,
    engine: &EngineSpec,
    schedule: &AnnealingSchedule,
    options: &AnnealOptions,
    trials: usize,
    seed: u64,
) -> Result<Vec<TrialRecord>> {
    engine.validate(&instance.model)?;
    let label = engine.label();
    (0..trials as u64)
        .into_par_iter()
        .map(|i| anneal(&instance.model, engine, schedule, options, trial_seed(seed, &label, i)))
        .collect()
}

pub fn run_benchmark(
    instance: &InstanceArtifact,
    config: &BenchmarkConfig,
    reference: ReferenceRequest,
) -> Result<BenchmarkResult> {
    if config.trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    if config.anneal.num_steps == 0 {
        return Err(Error::Config("steps must be at least 1".into()));
    }
    if config.engines.is_empty() {
        return Err(Error::Config("no engines selected".into()));
    }
    for engine in &config.engines {
        engine.validate(&instance.model)?;
    }
    let mut engines = Vec::with_capacity(config.engines.len());
    for engine in &config.engines {
        let records = run_trials(instance, engine, &config.schedule, &config.anneal, config.trials, config.seed)?;
        engines.push(EngineResult {
            label: engine.label(),
            engine: engine.clone(),
            records,
            success_rate: None,
        });
    }
    let reference = resolve_reference(
        instance,
        reference,
        engines.iter().flat_map(|e| e.records.iter().map(|r| r.min_energy)),
    )?;
    if let Some(r) = reference {
        let tol = config.tolerance.absolute(r.value);
        for e in &mut engines {
            e.success_rate = Some(success_rate(&e.records, r.value, tol)?);
        }
    }
    let series: Vec<(String, Vec<f64>)> = engines
        .iter()
        .map(|e| (e.label.clone(), e.records.iter().map(|r| r.min_energy).collect()))
        .collect();
    let histogram = EnergyHistogram::build(&series, config.bins, None)?;
    Ok(BenchmarkResult {
        config: config.clone(),
        family: instance.family_name().to_string(),
        metadata: instance.metadata.clone(),
        num_vertices: instance.model.num_vertices(),
        num_couplings: instance.model.num_couplings(),
        engines,
        reference,
        histogram,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub epsilon: f64,
    pub success_rate: Option<f64>,
    pub min_energy: f64,
    pub mean_energy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    pub reference: Option<Reference>,
}

impl SweepResult {
    /// The ε with the highest success rate; the smallest such ε on ties.
    pub fn best_epsilon(&self) -> Option<f64> {
        self.points
            .iter()
            .filter_map(|p| p.success_rate.map(|r| (p.epsilon, r)))
            .fold(None, |best: Option<(f64, f64)>, (eps, rate)| match best {
                Some((_, r)) if r >= rate => best,
                _ => Some((eps, rate)),
            })
            .map(|(eps, _)| eps)
    }
}

/// Success rate of ε-SCA for each ε. An empirical reference is pooled over
/// every ε in the sweep.
pub fn epsilon_sweep(
    instance: &InstanceArtifact,
    epsilons: &[f64],
    config: &BenchmarkConfig,
    reference: ReferenceRequest,
) -> Result<SweepResult> {
    if epsilons.is_empty() {
        return Err(Error::Config("epsilon sweep needs at least one value".into()));
    }
    let runs: Vec<(f64, Vec<TrialRecord>)> = epsilons
        .iter()
        .map(|&eps| {
            let engine = EngineSpec::epsilon_sca(eps)?;
            let records = run_trials(instance, &engine, &config.schedule, &config.anneal, config.trials, config.seed)?;
            Ok((eps, records))
        })
        .collect::<Result<_>>()?;
    let reference = resolve_reference(
        instance,
        reference,
        runs.iter().flat_map(|(_, rs)| rs.iter().map(|r| r.min_energy)),
    )?;
    let points = runs
        .iter()
        .map(|(eps, records)| {
            let rate = match reference {
                Some(r) => Some(success_rate(records, r.value, config.tolerance.absolute(r.value))?),
                None => None,
            };
            Ok(SweepPoint {
                epsilon: *eps,
                success_rate: rate,
                min_energy: records.iter().map(|r| r.min_energy).fold(f64::INFINITY, f64::min),
                mean_energy: records.iter().map(|r| r.min_energy).sum::<f64>() / records.len() as f64,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SweepResult { points, reference })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    /// `trials.csv`, `histogram.csv` and `summary.json`.
    Csv,
    /// A single `results.json` with summary, trials and histogram.
    Json,
}

#[derive(Serialize)]
struct EngineSummary<'a> {
    engine: &'a EngineSpec,
    label: &'a str,
    trials: usize,
    min_energy: f64,
    mean_energy: f64,
    success_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    best_tour_length: Option<u64>,
}

#[derive(Serialize)]
struct ParameterSummary<'a> {
    schedule: &'a AnnealingSchedule,
    trials: usize,
    steps: u64,
    sweeps_per_step: u32,
    seed: u64,
    success_tolerance: SuccessTolerance,
    bins: usize,
}

#[derive(Serialize)]
struct InstanceSummary<'a> {
    family: &'a str,
    num_vertices: usize,
    num_couplings: usize,
    metadata: &'a Option<InstanceMetadata>,
    /// Every trial of every engine runs on this one instance.
    shared_instance: bool,
}

#[derive(Serialize)]
struct ReferenceSummary {
    value: Option<f64>,
    provenance: &'static str,
}

#[derive(Serialize)]
struct Summary<'a> {
    instance: InstanceSummary<'a>,
    parameters: ParameterSummary<'a>,
    reference: ReferenceSummary,
    engines: Vec<EngineSummary<'a>>,
}

#[derive(Serialize)]
struct TrialRow<'a> {
    engine: &'a str,
    trial: usize,
    seed: u64,
    min_energy: f64,
    best_step: u64,
}

#[derive(Serialize)]
struct FullResults<'a> {
    summary: Summary<'a>,
    trials: Vec<TrialRow<'a>>,
    histogram: &'a EnergyHistogram,
}

fn summary<'a>(result: &'a BenchmarkResult, instance: Option<&InstanceArtifact>) -> Summary<'a> {
    let tsp = instance.and_then(|i| i.tsp.as_ref());
    Summary {
        instance: InstanceSummary {
            family: &result.family,
            num_vertices: result.num_vertices,
            num_couplings: result.num_couplings,
            metadata: &result.metadata,
            shared_instance: true,
        },
        parameters: ParameterSummary {
            schedule: &result.config.schedule,
            trials: result.config.trials,
            steps: result.config.anneal.num_steps,
            sweeps_per_step: result.config.anneal.sweeps_per_step,
            seed: result.config.seed,
            success_tolerance: result.config.tolerance,
            bins: result.config.bins,
        },
        reference: ReferenceSummary {
            value: result.reference.map(|r| r.value),
            provenance: match result.reference.map(|r| r.provenance) {
                Some(ReferenceSource::Oracle) => "oracle",
                Some(ReferenceSource::Supplied) => "supplied",
                Some(ReferenceSource::Empirical) => "empirical",
                None => "none",
            },
        },
        engines: result
            .engines
            .iter()
            .map(|e| EngineSummary {
                engine: &e.engine,
                label: &e.label,
                trials: e.records.len(),
                min_energy: e.min_energy(),
                mean_energy: e.mean_energy(),
                success_rate: e.success_rate,
                best_tour_length: tsp.and_then(|t| {
                    e.records
                        .iter()
                        .filter_map(|r| t.decode_tour(&r.best_config).ok().and_then(|d| d.length()))
                        .min()
                }),
            })
            .collect(),
    }
}

fn trial_rows(result: &BenchmarkResult) -> Vec<TrialRow<'_>> {
    result
        .engines
        .iter()
        .flat_map(|e| {
            e.records.iter().enumerate().map(move |(trial, r)| TrialRow {
                engine: &e.label,
                trial,
                seed: r.seed,
                min_energy: r.min_energy,
                best_step: r.best_step,
            })
        })
        .collect()
}

pub fn trials_csv(result: &BenchmarkResult) -> String {
    let mut out = String::from("engine,trial,seed,min_energy,best_step\n");
    for row in trial_rows(result) {
        writeln!(out, "{},{},{},{:?},{}", row.engine, row.trial, row.seed, row.min_energy, row.best_step).unwrap();
    }
    out
}

pub fn histogram_csv(histogram: &EnergyHistogram) -> String {
    let mut out = String::from("bin_lo,bin_hi");
    for name in &histogram.engines {
        write!(out, ",{name}").unwrap();
    }
    out.push('\n');
    let bins = histogram.edges.len().saturating_sub(1);
    for b in 0..bins {
        write!(out, "{:?},{:?}", histogram.edges[b], histogram.edges[b + 1]).unwrap();
        for counts in &histogram.counts {
            write!(out, ",{}", counts[b]).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn sweep_csv(sweep: &SweepResult) -> String {
    let mut out = String::from("epsilon,success_rate,min_energy,mean_energy\n");
    for p in &sweep.points {
        let rate = p.success_rate.map(|r| format!("{r:?}")).unwrap_or_default();
        writeln!(out, "{:?},{},{:?},{:?}", p.epsilon, rate, p.min_energy, p.mean_energy).unwrap();
    }
    out
}

fn write_file(path: PathBuf, contents: &str) -> Result<PathBuf> {
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes benchmark outputs into `dir`; identical results give identical bytes.
pub fn emit_outputs(
    result: &BenchmarkResult,
    instance: Option<&InstanceArtifact>,
    dir: &Path,
    format: OutputFormat,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let summary = summary(result, instance);
    match format {
        OutputFormat::Csv => {
            let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
            Ok(vec![
                write_file(dir.join("trials.csv"), &trials_csv(result))?,
                write_file(dir.join("histogram.csv"), &histogram_csv(&result.histogram))?,
                write_file(dir.join("summary.json"), &(json + "\n"))?,
            ])
        }
        OutputFormat::Json => {
            let full = FullResults {
                summary,
                trials: trial_rows(result),
                histogram: &result.histogram,
            };
            let json = serde_json::to_string_pretty(&full).expect("results serialize");
            Ok(vec![write_file(dir.join("results.json"), &(json + "\n"))?])
        }
    }
}
