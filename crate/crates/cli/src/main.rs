mod output;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use costboost::boosters::train_threshold_tuned;
use costboost::datagen::{fingerprint, fmt_f64, generate, load_csv, write_csv, SynthKind, SynthSpec};
use costboost::metrics::cost_error;
use costboost::persist::{write_trace_csv, ModelFile};
use costboost::predictors::{find_non_monotone, interior_grid, isoline_grid, RiskVariant};
use costboost::sweep::{run_sweep, write_sweep_csv};
use costboost::{build_pool, train, Algorithm, CostSpec, Dataset, Error, Parallelism, TrainConfig};

use output::{emit, write_atomic};

#[derive(Parser)]
#[command(name = "costboost", version, about = "Cost-sensitive boosting over decision stumps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one model and write model.json, trace.csv and manifest.json.
    Train(TrainArgs),
    /// Print the cost-sensitive error of a saved model as JSON.
    Eval(EvalArgs),
    /// Train every (algorithm, cost) pair and write a summary CSV.
    Sweep(SweepArgs),
    /// Write the optimal-predictor grid over (p, gamma) as CSV.
    PredictorMap(PredictorMapArgs),
    /// Write a synthetic dataset as CSV.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct DataArgs {
    /// CSV file with header f1,...,fd,label[,cost].
    #[arg(long, conflicts_with = "synth")]
    data: Option<PathBuf>,
    /// Synthetic dataset kind instead of a file.
    #[arg(long)]
    synth: Option<SynthKind>,
    #[arg(long, default_value_t = 100)]
    n_pos: usize,
    #[arg(long, default_value_t = 100)]
    n_neg: usize,
    #[arg(long, default_value_t = 0)]
    data_seed: u64,
    #[arg(long, default_value_t = 2)]
    dims: usize,
    #[arg(long, default_value_t = 2.0)]
    separation: f64,
    #[arg(long, default_value_t = 1.0)]
    spread: f64,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long = "algo")]
    algorithm: Algorithm,
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 1.0)]
    cp: f64,
    #[arg(long, default_value_t = 1.0)]
    cn: f64,
    #[arg(long, default_value_t = 100)]
    rounds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = costboost::boosters::DEFAULT_EPSILON_CLAMP)]
    epsilon_clamp: f64,
    /// Validation CSV for threshold_tuned.
    #[arg(long)]
    validation: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Scan candidates on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    data: DataArgs,
    /// Costs for the global error; the model's own costs by default.
    #[arg(long, requires = "cn")]
    cp: Option<f64>,
    #[arg(long, requires = "cp")]
    cn: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long = "algos", value_delimiter = ',', default_values_t = Algorithm::ALL)]
    algorithms: Vec<Algorithm>,
    /// Cost pairs as C_P:C_N.
    #[arg(long, value_delimiter = ',', default_values = ["1:1", "2:1", "4:1"])]
    costs: Vec<String>,
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 50)]
    rounds: usize,
    /// Summary CSV path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct PredictorMapArgs {
    #[arg(long)]
    variant: RiskVariant,
    /// Number of interior posterior values.
    #[arg(long, default_value_t = 99)]
    p_points: usize,
    /// Ascending cost asymmetries in (0, 1).
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9])]
    gammas: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    kind: SynthKind,
    #[arg(long, default_value_t = 100)]
    n_pos: usize,
    #[arg(long, default_value_t = 100)]
    n_neg: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    dims: usize,
    #[arg(long, default_value_t = 2.0)]
    separation: f64,
    #[arg(long, default_value_t = 1.0)]
    spread: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A message for standard error and the process exit code.
struct Failure {
    code: u8,
    message: String,
}

const EXIT_ARGS: u8 = 2;
const EXIT_DATA: u8 = 3;
const EXIT_TRAIN: u8 = 4;
const EXIT_OUTPUT: u8 = 1;

fn fail(code: u8, message: impl ToString) -> Failure {
    Failure { code, message: message.to_string() }
}

/// Data-file problems always map to the data exit code.
fn classify(e: Error, otherwise: u8) -> Failure {
    let code = if e.is_data_error() { EXIT_DATA } else { otherwise };
    fail(code, e)
}

fn output_error(path: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| fail(EXIT_OUTPUT, format!("cannot write {}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(f) = configure_threads() {
        eprintln!("error: {}", f.message);
        return ExitCode::from(f.code);
    }
    let result = match cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::PredictorMap(a) => cmd_predictor_map(a),
        Command::Generate(a) => cmd_generate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Honors `COSTBOOST_THREADS` (0 or unset means one thread per core).
fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("COSTBOOST_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| fail(EXIT_ARGS, format!("COSTBOOST_THREADS must be a non-negative integer, got '{raw}'")))?;
    #[cfg(feature = "parallel")]
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| fail(EXIT_ARGS, format!("cannot configure thread pool: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn parallelism(sequential: bool) -> Parallelism {
    if sequential {
        Parallelism::Sequential
    } else {
        Parallelism::default()
    }
}

fn load(args: &DataArgs) -> Result<(Dataset, serde_json::Value), Failure> {
    match (&args.data, args.synth) {
        (Some(path), _) => {
            let ds = load_csv(path).map_err(|e| fail(EXIT_DATA, format!("{}: {e}", path.display())))?;
            Ok((ds, json!({ "csv": path })))
        }
        (None, Some(kind)) => {
            let spec = SynthSpec::new(kind, args.n_pos, args.n_neg, args.data_seed)
                .with_dims(args.dims)
                .with_blobs(args.separation, args.spread);
            let ds = generate(&spec).map_err(|e| fail(EXIT_ARGS, e))?;
            Ok((ds, json!({ "synth": spec })))
        }
        (None, None) => Err(fail(EXIT_ARGS, "either --data or --synth is required")),
    }
}

fn costs(cp: f64, cn: f64) -> Result<CostSpec, Failure> {
    CostSpec::new(cp, cn).map_err(|e| fail(EXIT_ARGS, e))
}

fn parse_cost_pair(s: &str) -> Result<CostSpec, Failure> {
    let bad = || fail(EXIT_ARGS, format!("cost pair '{s}' is not of the form C_P:C_N"));
    let (p, n) = s.split_once(':').ok_or_else(bad)?;
    let p: f64 = p.trim().parse().map_err(|_| bad())?;
    let n: f64 = n.trim().parse().map_err(|_| bad())?;
    costs(p, n)
}

fn cmd_train(args: TrainArgs) -> Result<(), Failure> {
    let start = Instant::now();
    let (dataset, source) = load(&args.data)?;
    let cost_spec = costs(args.cp, args.cn)?;
    if args.algorithm.is_cost_insensitive() && !cost_spec.is_symmetric() {
        eprintln!(
            "warning: {} ignores costs; C_P={} and C_N={} only affect the reported errors",
            args.algorithm, cost_spec.c_pos, cost_spec.c_neg
        );
    }
    let mut config = TrainConfig::new(args.algorithm, args.rounds, cost_spec);
    config.seed = args.seed;
    config.epsilon_clamp = args.epsilon_clamp;
    config.parallelism = parallelism(args.sequential);
    config.validate(&dataset).map_err(|e| classify(e, EXIT_ARGS))?;

    let validation = match &args.validation {
        Some(_) if args.algorithm != Algorithm::ThresholdTuned => {
            return Err(fail(EXIT_ARGS, "--validation only applies to threshold_tuned"));
        }
        Some(path) => Some(load_csv(path).map_err(|e| fail(EXIT_DATA, format!("{}: {e}", path.display())))?),
        None => None,
    };
    if let Some(v) = &validation {
        if v.n_features() != dataset.n_features() {
            return Err(fail(EXIT_DATA, "validation set has a different number of features"));
        }
    }

    let pool = build_pool(&dataset);
    let model = match &validation {
        Some(v) => train_threshold_tuned(&config, &dataset, &pool, Some(v)),
        None => train(&config, &dataset, &pool),
    }
    .map_err(|e| classify(e, EXIT_TRAIN))?;
    if model.stopped_early {
        eprintln!("note: no admissible weak classifier after {} rounds", model.rounds_completed());
    }

    let model_json = ModelFile::from_model(&model).to_json().map_err(|e| fail(EXIT_OUTPUT, e))?;
    let mut trace = Vec::new();
    write_trace_csv(&model.trace, &mut trace).map_err(|e| fail(EXIT_OUTPUT, e))?;

    fs::create_dir_all(&args.out).map_err(output_error(&args.out))?;
    let model_path = args.out.join("model.json");
    let trace_path = args.out.join("trace.csv");
    let manifest_path = args.out.join("manifest.json");
    write_atomic(&model_path, model_json.as_bytes()).map_err(output_error(&model_path))?;
    write_atomic(&trace_path, &trace).map_err(output_error(&trace_path))?;

    let manifest = json!({
        "command": "train",
        "config": config,
        "dataset": {
            "source": source,
            "fingerprint": fingerprint(&dataset),
            "n_pos": dataset.n_pos(),
            "n_neg": dataset.n_neg(),
            "n_features": dataset.n_features(),
        },
        "validation": validation.as_ref().map(|v| json!({ "source": args.validation, "fingerprint": fingerprint(v) })),
        "rounds_completed": model.rounds_completed(),
        "stopped_early": model.stopped_early,
        "outputs": [&model_path, &trace_path, &manifest_path],
        "duration_ms": start.elapsed().as_secs_f64() * 1e3,
    });
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| fail(EXIT_OUTPUT, e))?;
    write_atomic(&manifest_path, text.as_bytes()).map_err(output_error(&manifest_path))?;

    if let Some(last) = model.trace.last() {
        eprintln!(
            "{}: {} rounds, train error {:.4} (pos {:.4}, neg {:.4})",
            model.algorithm,
            model.rounds_completed(),
            last.train_error,
            last.pos_error,
            last.neg_error
        );
    }
    println!("{}", args.out.display());
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&args.model).map_err(|e| fail(EXIT_DATA, format!("{}: {e}", args.model.display())))?;
    let file = ModelFile::from_json(&text).map_err(|e| fail(EXIT_DATA, format!("{}: {e}", args.model.display())))?;
    let ensemble = file.ensemble().map_err(|e| fail(EXIT_DATA, format!("{}: {e}", args.model.display())))?;
    let (dataset, _) = load(&args.data)?;
    if dataset.n_features() != ensemble.n_features {
        return Err(fail(
            EXIT_DATA,
            format!("model expects {} features, dataset has {}", ensemble.n_features, dataset.n_features()),
        ));
    }
    let cost_spec = match (args.cp, args.cn) {
        (Some(p), Some(n)) => costs(p, n)?,
        _ => file.cost_spec,
    };
    let report = cost_error(&ensemble, &dataset, &cost_spec).map_err(|e| classify(e, EXIT_DATA))?;
    let out = serde_json::to_string_pretty(&report).map_err(|e| fail(EXIT_OUTPUT, e))?;
    println!("{out}");
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Failure> {
    if args.algorithms.is_empty() {
        return Err(fail(EXIT_ARGS, "no algorithms given"));
    }
    if args.rounds == 0 {
        return Err(fail(EXIT_ARGS, "rounds must be at least 1"));
    }
    let cost_list = args.costs.iter().map(|s| parse_cost_pair(s)).collect::<Result<Vec<_>, _>>()?;
    let (dataset, _) = load(&args.data)?;
    let pool = build_pool(&dataset);
    let rows = run_sweep(&args.algorithms, &cost_list, &dataset, &pool, args.rounds, parallelism(args.sequential));

    let mut buf = Vec::new();
    write_sweep_csv(&rows, &mut buf).map_err(|e| fail(EXIT_OUTPUT, e))?;
    let target = args.out.as_deref();
    emit(target, &buf).map_err(output_error(target.unwrap_or(Path::new("-"))))?;

    let failed = rows.iter().filter(|r| !r.is_ok()).count();
    for r in rows.iter().filter(|r| !r.is_ok()) {
        eprintln!("warning: {} at {}:{} failed: {}", r.algorithm, r.c_pos, r.c_neg, r.status);
    }
    if failed == rows.len() {
        return Err(fail(EXIT_TRAIN, "every sweep cell failed"));
    }
    Ok(())
}

fn cmd_predictor_map(args: PredictorMapArgs) -> Result<(), Failure> {
    if args.p_points == 0 {
        return Err(fail(EXIT_ARGS, "--p-points must be at least 1"));
    }
    if args.gammas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(fail(EXIT_ARGS, "--gammas must be strictly ascending"));
    }
    let grid = isoline_grid(args.variant, &args.gammas, &interior_grid(args.p_points)).map_err(|e| fail(EXIT_ARGS, e))?;
    if let Some(w) = find_non_monotone(&grid, args.gammas.len()) {
        eprintln!(
            "non-monotone row at p = {}: f = {} at gamma = {} but f = {} at gamma = {}",
            w.p, w.lower.f_value, w.lower.gamma, w.higher.f_value, w.higher.gamma
        );
    }
    let mut text = String::from("p,gamma,f\n");
    for pt in &grid {
        let _ = writeln!(text, "{},{},{}", fmt_f64(pt.p), fmt_f64(pt.gamma), fmt_f64(pt.f_value));
    }
    let target = args.out.as_deref();
    emit(target, text.as_bytes()).map_err(output_error(target.unwrap_or(Path::new("-"))))
}

fn cmd_generate(args: GenerateArgs) -> Result<(), Failure> {
    let spec = SynthSpec::new(args.kind, args.n_pos, args.n_neg, args.seed)
        .with_dims(args.dims)
        .with_blobs(args.separation, args.spread);
    let dataset = generate(&spec).map_err(|e| fail(EXIT_ARGS, e))?;
    let mut buf = Vec::new();
    write_csv(&dataset, &mut buf).map_err(|e| fail(EXIT_OUTPUT, e))?;
    let target = args.out.as_deref();
    emit(target, &buf).map_err(output_error(target.unwrap_or(Path::new("-"))))
}
