use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ising_sca::dynamics::{AnnealOptions, EngineSpec};
use ising_sca::error::{Error, Result};
use ising_sca::exact::{brute_force_ground_states, verify_mixing, MixingReport};
use ising_sca::harness::{
    emit_outputs, epsilon_sweep, run_benchmark, sweep_csv, BenchmarkConfig, OutputFormat, ReferenceRequest,
    SuccessTolerance, DEFAULT_BINS,
};
use ising_sca::problems::{read_instance, tsp::tours_from_origin, write_instance, Family, InstanceArtifact};
use ising_sca::schedule::{default_pinning, make_convergent_schedule, AnnealingSchedule, DEFAULT_ALPHA, DEFAULT_BETA0};

const OUT_DIR_ENV: &str = "ISING_SCA_OUT_DIR";
const SUBCOMMANDS: [&str; 5] = ["generate", "run", "sweep", "verify", "exact"];

#[derive(Parser, Debug)]
#[command(name = "ising-sca", version, about = "Ising annealing with Glauber, SCA and ε-SCA dynamics")]
#[command(args_override_self = true)]
struct Cli {
    /// key=value file whose entries act as flags; explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads for trial-level parallelism (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a seeded instance file.
    Generate(GenerateArgs),
    /// Run multi-trial annealing benchmarks on an instance.
    Run(RunArgs),
    /// Success rate of ε-SCA over a list of ε values.
    Sweep(SweepArgs),
    /// Check mixing-time bounds against exact kernels (N <= 10).
    Verify(VerifyArgs),
    /// Exhaustive ground states (N <= 30).
    Exact(ExactArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    Gaussian,
    Bernoulli,
    Maxcut,
    Tsp,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum EngineArg {
    Glauber,
    Sca,
    Esca,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ScheduleArg {
    Exp,
    Log,
    Const,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Vertex count (spin-glass and max-cut families).
    #[arg(long)]
    n: Option<usize>,
    /// Edge or +1-coupling probability.
    #[arg(long)]
    p: Option<f64>,
    /// City count (TSP).
    #[arg(long)]
    cities: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AnnealArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "exp")]
    schedule: ScheduleArg,
    #[arg(long, default_value_t = DEFAULT_BETA0)]
    beta0: f64,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// SCA pinning: `auto` (λ/2 at every vertex) or a number.
    #[arg(long, default_value = "auto")]
    pinning: String,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 10_000)]
    steps: u64,
    #[arg(long, default_value_t = 1)]
    sweeps_per_step: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `oracle`, `empirical`, `none` or a number.
    #[arg(long, default_value = "empirical")]
    reference: String,
    /// Success tolerance; defaults to exact for integer-valued instances, 1e-6 relative otherwise.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
    #[arg(long, env = OUT_DIR_ENV, default_value = "results")]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    common: AnnealArgs,
    /// Comma-separated engines.
    #[arg(long, default_value = "glauber,sca,esca")]
    engine: String,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    common: AnnealArgs,
    /// Comma-separated ε values.
    #[arg(long, default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0")]
    epsilons: String,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "esca")]
    engine: EngineArg,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long, default_value = "auto")]
    pinning: String,
    #[arg(long)]
    beta: f64,
    /// Comma-separated TV targets.
    #[arg(long, default_value = "0.1,0.01")]
    delta: String,
    #[arg(long, env = OUT_DIR_ENV, default_value = "results")]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct ExactArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Print at most this many ground states.
    #[arg(long, default_value_t = 16)]
    show: usize,
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::Config(format!("cannot parse {what} {s:?}"))))
        .collect()
}

fn pinning_for(instance: &InstanceArtifact, text: &str) -> Result<Vec<f64>> {
    if text == "auto" {
        return default_pinning(&instance.model);
    }
    let q: f64 = text
        .parse()
        .map_err(|_| Error::Config(format!("pinning must be `auto` or a number, got {text:?}")))?;
    Ok(vec![q; instance.model.num_vertices()])
}

fn engine_spec(instance: &InstanceArtifact, engine: EngineArg, epsilon: f64, pinning: &str) -> Result<EngineSpec> {
    match engine {
        EngineArg::Glauber => Ok(EngineSpec::Glauber),
        EngineArg::Sca => EngineSpec::sca(pinning_for(instance, pinning)?),
        EngineArg::Esca => EngineSpec::epsilon_sca(epsilon),
    }
}

fn schedule_for(instance: &InstanceArtifact, args: &AnnealArgs) -> Result<AnnealingSchedule> {
    match args.schedule {
        ScheduleArg::Exp => AnnealingSchedule::exponential(args.beta0, args.alpha),
        ScheduleArg::Const => AnnealingSchedule::constant(args.beta0),
        ScheduleArg::Log => {
            let pinning = pinning_for(instance, &args.pinning)?;
            Ok(make_convergent_schedule(&instance.model, &pinning)?.schedule)
        }
    }
}

fn reference_for(text: &str) -> Result<ReferenceRequest> {
    Ok(match text {
        "oracle" => ReferenceRequest::Oracle,
        "empirical" => ReferenceRequest::Empirical,
        "none" => ReferenceRequest::None,
        other => ReferenceRequest::Supplied(other.parse().map_err(|_| {
            Error::Config(format!("reference must be oracle, empirical, none or a number, got {other:?}"))
        })?),
    })
}

fn bench_config(instance: &InstanceArtifact, args: &AnnealArgs, engines: Vec<EngineSpec>) -> Result<BenchmarkConfig> {
    let tolerance = match args.tolerance {
        Some(t) if t >= 0.0 => SuccessTolerance::Absolute(t),
        Some(t) => return Err(Error::Config(format!("tolerance must be nonnegative, got {t}"))),
        None => SuccessTolerance::for_instance(instance),
    };
    Ok(BenchmarkConfig {
        engines,
        schedule: schedule_for(instance, args)?,
        trials: args.trials,
        anneal: AnnealOptions {
            num_steps: args.steps,
            sweeps_per_step: args.sweeps_per_step,
            record_trace: false,
        },
        seed: args.seed,
        tolerance,
        bins: args.bins,
    })
}

fn generate(args: &GenerateArgs) -> Result<()> {
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| Error::Config(format!("--{flag} is required")));
    let family = match args.family {
        FamilyArg::Gaussian => Family::GaussianSpinGlass { n: need(args.n, "n")? },
        FamilyArg::Bernoulli => Family::BernoulliSpinGlass {
            n: need(args.n, "n")?,
            p: args.p.unwrap_or(0.5),
        },
        FamilyArg::Maxcut => Family::MaxCut {
            n: need(args.n, "n")?,
            p: args.p.unwrap_or(0.5),
        },
        FamilyArg::Tsp => Family::Tsp {
            cities: need(args.cities, "cities")?,
        },
    };
    let artifact = family.generate(args.seed)?;
    match &args.output {
        Some(path) => {
            write_instance(path, &artifact)?;
            eprintln!("wrote {} (N = {})", path.display(), artifact.model.num_vertices());
        }
        None => print!("{}", ising_sca::problems::format_instance(&artifact)),
    }
    Ok(())
}

fn format_of(arg: FormatArg) -> OutputFormat {
    match arg {
        FormatArg::Csv => OutputFormat::Csv,
        FormatArg::Json => OutputFormat::Json,
    }
}

fn run(args: &RunArgs) -> Result<()> {
    let instance = read_instance(&args.common.instance)?;
    let mut kinds: Vec<EngineArg> = Vec::new();
    for name in args.engine.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let kind = EngineArg::from_str(name, true).map_err(|_| Error::Config(format!("unknown engine {name:?}")))?;
        if !kinds.contains(&kind) {
            kinds.push(kind);
        }
    }
    let engines = kinds
        .into_iter()
        .map(|k| engine_spec(&instance, k, args.epsilon, &args.common.pinning))
        .collect::<Result<Vec<_>>>()?;
    let config = bench_config(&instance, &args.common, engines)?;
    let result = run_benchmark(&instance, &config, reference_for(&args.common.reference)?)?;
    let files = emit_outputs(&result, Some(&instance), &args.common.out_dir, format_of(args.common.format))?;

    if let Some(r) = result.reference {
        println!("reference {:?} ({:?})", r.value, r.provenance);
    }
    for e in &result.engines {
        let rate = e
            .success_rate
            .map(|r| format!("{:.1}%", r * 100.0))
            .unwrap_or_else(|| "n/a".into());
        println!(
            "{:<24} min {:<14} mean {:<14.4} success {}",
            e.label,
            e.min_energy(),
            e.mean_energy(),
            rate
        );
    }
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn sweep(args: &SweepArgs) -> Result<()> {
    let instance = read_instance(&args.common.instance)?;
    let epsilons: Vec<f64> = parse_list(&args.epsilons, "epsilon")?;
    let config = bench_config(&instance, &args.common, vec![])?;
    let result = epsilon_sweep(&instance, &epsilons, &config, reference_for(&args.common.reference)?)?;
    let dir = &args.common.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let path = match args.common.format {
        FormatArg::Csv => {
            let path = dir.join("sweep.csv");
            std::fs::write(&path, sweep_csv(&result)).map_err(|e| io_error(&path, e))?;
            path
        }
        FormatArg::Json => {
            let path = dir.join("sweep.json");
            let json = serde_json::to_string_pretty(&result).expect("sweep serializes") + "\n";
            std::fs::write(&path, json).map_err(|e| io_error(&path, e))?;
            path
        }
    };
    for p in &result.points {
        let rate = p.success_rate.map(|r| format!("{:.1}%", r * 100.0)).unwrap_or_else(|| "n/a".into());
        println!("eps {:<6} success {:<7} min {}", p.epsilon, rate, p.min_energy);
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn verify(args: &VerifyArgs) -> Result<()> {
    let instance = read_instance(&args.instance)?;
    let spec = match args.engine {
        EngineArg::Glauber => {
            return Err(Error::Config("no mixing bound is implemented for Glauber dynamics".into()));
        }
        kind => engine_spec(&instance, kind, args.epsilon, &args.pinning)?,
    };
    let deltas: Vec<f64> = parse_list(&args.delta, "delta")?;
    let reports = deltas
        .iter()
        .map(|&d| verify_mixing(&instance.model, &spec, args.beta, d))
        .collect::<Result<Vec<MixingReport>>>()?;
    for r in &reports {
        let t = r.t_bound.map(|t| t.to_string()).unwrap_or_else(|| "inapplicable".into());
        let tv = r.tv_at_bound.map(|v| format!("{v:.3e}")).unwrap_or_else(|| "-".into());
        let status = match r.passed {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "SKIP",
        };
        println!(
            "{status} {} beta={} delta={} r={:.6} t_bound={t} tv={tv}",
            r.engine, r.beta, r.delta, r.r
        );
    }
    std::fs::create_dir_all(&args.out_dir).map_err(|e| io_error(&args.out_dir, e))?;
    let path = args.out_dir.join("verify.json");
    let json = serde_json::to_string_pretty(&reports).expect("reports serialize") + "\n";
    std::fs::write(&path, json).map_err(|e| io_error(&path, e))?;
    println!("wrote {}", path.display());
    Ok(())
}

#[derive(Serialize)]
struct ExactSummary {
    num_vertices: usize,
    min_energy: f64,
    ground_state_count: u64,
    truncated: bool,
    ground_states: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    optimal_tour: Option<(Vec<usize>, u64)>,
}

fn exact(args: &ExactArgs) -> Result<()> {
    let instance = read_instance(&args.instance)?;
    let optimal_tour = instance.tsp.as_ref().map(|t| {
        tours_from_origin(t.num_cities())
            .into_iter()
            .map(|tour| {
                let len = t.tour_length(&tour);
                (tour, len)
            })
            .min_by_key(|(_, len)| *len)
            .expect("at least one tour")
    });
    let set = brute_force_ground_states(&instance.model)?;
    let summary = ExactSummary {
        num_vertices: set.num_vertices,
        min_energy: set.min_energy,
        ground_state_count: set.count,
        truncated: set.truncated,
        ground_states: set.configurations().take(args.show).map(|c| c.to_string()).collect(),
        optimal_tour,
    };
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    Ok(())
}

/// Reads `--config` and splices its entries in as flags right after the
/// subcommand, so flags given on the command line take precedence.
fn expand_config(mut argv: Vec<String>) -> Result<Vec<String>> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        if a == "--config" {
            path = argv.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else { return Ok(argv) };
    let text = std::fs::read_to_string(&path).map_err(|e| io_error(Path::new(&path), e))?;
    let mut extra = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: k + 1,
            message: format!("expected key=value in {path}"),
        })?;
        let key = key.trim().replace('_', "-");
        if key == "config" {
            return Err(Error::Config("config files cannot include other config files".into()));
        }
        extra.push(format!("--{key}={}", value.trim()));
    }
    let at = argv
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.as_str()))
        .map_or(argv.len(), |i| i + 1);
    argv.splice(at..at, extra);
    Ok(argv)
}

fn dispatch(cli: &Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(format!("cannot configure thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::Verify(a) => verify(a),
        Command::Exact(a) => exact(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let result = expand_config(std::env::args().collect()).and_then(|argv| {
        let cli = Cli::try_parse_from(argv).unwrap_or_else(|e| e.exit());
        dispatch(&cli)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
