//! The `csvm` command-line front end.
//!
//! Exit codes: 0 on success, 1 for runtime failures (I/O, data, training),
//! 2 for usage and validation errors.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::classifier::{Hyperparams, MulticlassModel, MulticlassStrategy};
use crate::data;
use crate::data::{
    load_csv, load_libsvm, make_shifted_gaussians, read_feature_rows, save_libsvm, Dataset, Domain,
    FileSpec, SyntheticSpec,
};
use crate::error::Error;
use crate::experiment::{run_experiment, run_sweep, ExperimentConfig, SweepAxis};
use crate::model_selection::{loo_cv, HyperGrid};

#[derive(Debug, Parser)]
#[command(
    name = "csvm",
    version,
    about = "Coupled linear SVMs for supervised domain adaptation"
)]
pub struct Cli {
    /// Cap the number of worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a multiclass coupled model from a source and a target file.
    Train(TrainArgs),
    /// Predict labels and per-class scores for a feature file.
    Predict(PredictArgs),
    /// Evaluate a saved model on a labeled file.
    Eval(EvalArgs),
    /// Run leave-one-out cross-validation and report the best grid point.
    Cv(CvArgs),
    /// Run a repeated-split experiment from a JSON config.
    Experiment(ExperimentArgs),
    /// Sweep a per-class sample count and record accuracy curves.
    Sweep(SweepArgs),
    /// Generate synthetic two-domain data and write libsvm files.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Libsvm,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    #[value(name = "ova")]
    OneVsAll,
    #[value(name = "ovo")]
    OneVsOne,
}

impl From<StrategyArg> for MulticlassStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::OneVsAll => MulticlassStrategy::OneVsAll,
            StrategyArg::OneVsOne => MulticlassStrategy::OneVsOne,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryArg {
    Source,
    Target,
}

impl From<BoundaryArg> for Domain {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Source => Domain::Source,
            BoundaryArg::Target => Domain::Target,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    #[value(name = "source_count")]
    SourceCount,
    #[value(name = "target_count")]
    TargetCount,
    #[value(name = "both")]
    Both,
}

impl From<AxisArg> for SweepAxis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::SourceCount => SweepAxis::SourceCount,
            AxisArg::TargetCount => SweepAxis::TargetCount,
            AxisArg::Both => SweepAxis::Both,
        }
    }
}

fn parse_nonneg(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if !v.is_finite() || v < 0.0 {
        return Err("must be finite and >= 0".into());
    }
    Ok(v)
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if !v.is_finite() || v <= 0.0 {
        return Err("must be finite and > 0".into());
    }
    Ok(v)
}

/// File-format flags shared by commands that read labeled data.
#[derive(Debug, Args)]
pub struct FormatFlags {
    /// Input data format.
    #[arg(long, value_enum, default_value_t = FormatArg::Libsvm)]
    pub format: FormatArg,
    /// CSV only: zero-based index of the label column.
    #[arg(long, default_value_t = 0)]
    pub label_column: usize,
    /// CSV only: skip the first line.
    #[arg(long)]
    pub has_header: bool,
}

impl FormatFlags {
    fn file_spec(&self, path: &Path) -> FileSpec {
        match self.format {
            FormatArg::Libsvm => FileSpec::libsvm(path),
            FormatArg::Csv => FileSpec::csv(path, self.label_column, self.has_header),
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Source-domain training file.
    #[arg(long)]
    pub source: PathBuf,
    /// Target-domain training file.
    #[arg(long)]
    pub target: PathBuf,
    #[command(flatten)]
    pub format: FormatFlags,
    /// Coupling weight between the two boundaries.
    #[arg(long, value_parser = parse_nonneg, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Source misclassification cost.
    #[arg(long = "cs", value_parser = parse_positive, allow_negative_numbers = true)]
    pub c_source: Option<f64>,
    /// Target misclassification cost.
    #[arg(long = "ct", value_parser = parse_positive, allow_negative_numbers = true)]
    pub c_target: Option<f64>,
    /// Pick {lambda, cs, ct} by leave-one-out cross-validation instead.
    #[arg(long)]
    pub cv: bool,
    /// Grid JSON for --cv (defaults to the built-in grid).
    #[arg(long)]
    pub grid: Option<PathBuf>,
    /// Where to write the cross-validation table CSV (defaults to the
    /// model path with a `.cv.csv` extension).
    #[arg(long)]
    pub cv_table: Option<PathBuf>,
    #[arg(long, value_parser = parse_positive, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_epochs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = StrategyArg::OneVsAll)]
    pub strategy: StrategyArg,
    /// Output model JSON path.
    #[arg(long)]
    pub out: PathBuf,
    /// Keep the dual variables in the model file.
    #[arg(long)]
    pub include_alphas: bool,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Model JSON written by `train`.
    #[arg(long)]
    pub model: PathBuf,
    /// Feature file; libsvm labels are ignored, CSV rows are all features.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Libsvm)]
    pub format: FormatArg,
    /// CSV only: skip the first line.
    #[arg(long)]
    pub has_header: bool,
    /// Which boundary scores the inputs.
    #[arg(long, value_enum, default_value_t = BoundaryArg::Target)]
    pub boundary: BoundaryArg,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Labeled data file.
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub format: FormatFlags,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Target)]
    pub boundary: BoundaryArg,
}

#[derive(Debug, Args)]
pub struct CvArgs {
    #[arg(long)]
    pub source: PathBuf,
    #[arg(long)]
    pub target: PathBuf,
    #[command(flatten)]
    pub format: FormatFlags,
    /// Grid JSON (defaults to the built-in grid).
    #[arg(long)]
    pub grid: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = StrategyArg::OneVsAll)]
    pub strategy: StrategyArg,
    #[arg(long, value_parser = parse_positive, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_epochs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Where to write the per-grid-point CSV table.
    #[arg(long)]
    pub table_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Experiment config JSON.
    #[arg(long)]
    pub config: PathBuf,
    /// Directory for report.json and splits.csv.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Experiment config JSON (its counts provide the fixed axis).
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, value_enum)]
    pub axis: AxisArg,
    /// Comma-separated per-class count values.
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<usize>,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Synthetic spec JSON.
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output libsvm file for the source domain.
    #[arg(long)]
    pub out_source: PathBuf,
    /// Output libsvm file for the target domain.
    #[arg(long)]
    pub out_target: PathBuf,
}

/// CLI failure with the exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Exit code 2: bad flags, bad config.
    Usage(String),
    /// Exit code 1: I/O, data, or training failure.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => m,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

type CliResult = Result<(), CliError>;

fn write_file(path: &Path, content: &str) -> CliResult {
    fs::write(path, content).map_err(|e| runtime(Error::io(path, e)))
}

fn load_labeled(spec: &FileSpec, domain: Domain) -> Result<Dataset, CliError> {
    match spec.format {
        data::Format::Libsvm => load_libsvm(&spec.path, domain).map_err(runtime),
        data::Format::Csv => {
            load_csv(&spec.path, spec.label_column, domain, spec.has_header).map_err(runtime)
        }
    }
}

fn load_grid(path: &Option<PathBuf>) -> Result<HyperGrid, CliError> {
    match path {
        None => Ok(HyperGrid::default_grid()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| runtime(Error::io(p, e)))?;
            let grid: HyperGrid = serde_json::from_str(&text).map_err(usage)?;
            grid.validate().map_err(usage)?;
            Ok(grid)
        }
    }
}

fn model_diagnostics_json(model: &MulticlassModel) -> serde_json::Value {
    let binaries: Vec<serde_json::Value> = model
        .binaries
        .iter()
        .map(|b| {
            let d = &b.model.diagnostics;
            json!({
                "task": b.task,
                "duality_gap": d.duality_gap,
                "kkt_violation": d.kkt_violation,
                "coupling_distance": d.coupling_distance,
                "support_vectors": d.support_vector_count,
                "epochs": d.epochs,
                "converged": d.converged,
            })
        })
        .collect();
    json!({
        "strategy": model.strategy,
        "class_count": model.class_count,
        "binaries": binaries,
        "warnings": model.warnings,
    })
}

fn cmd_train(args: &TrainArgs) -> CliResult {
    let source_spec = args.format.file_spec(&args.source);
    let target_spec = args.format.file_spec(&args.target);
    let (source, target) = data::load_two_domains(&source_spec, &target_spec).map_err(runtime)?;
    let strategy: MulticlassStrategy = args.strategy.into();

    let mut cv_json = serde_json::Value::Null;
    let hyper = if args.cv {
        let grid = load_grid(&args.grid)?;
        let base = Hyperparams {
            tol: args.tol,
            max_epochs: args.max_epochs,
            seed: args.seed,
            ..Hyperparams::default()
        };
        let cv = loo_cv(&source, &target, &grid, strategy, &base).map_err(runtime)?;
        let table_path = args
            .cv_table
            .clone()
            .unwrap_or_else(|| args.out.with_extension("cv.csv"));
        write_file(&table_path, &cv.table_csv())?;
        cv_json = json!({
            "best": { "lambda": cv.best.lambda, "c_source": cv.best.c_source, "c_target": cv.best.c_target },
            "fold_count": cv.fold_count,
            "table": table_path.display().to_string(),
        });
        cv.best
    } else {
        let (Some(lambda), Some(c_source), Some(c_target)) =
            (args.lambda, args.c_source, args.c_target)
        else {
            return Err(CliError::Usage(
                "provide --lambda, --cs and --ct, or use --cv".into(),
            ));
        };
        Hyperparams {
            lambda,
            c_source,
            c_target,
            tol: args.tol,
            max_epochs: args.max_epochs,
            seed: args.seed,
        }
    };

    let model = train_multiclass_checked(&source, &target, &hyper, strategy)?;
    model
        .save(&args.out, args.include_alphas)
        .map_err(runtime)?;

    let mut out = model_diagnostics_json(&model);
    out["model"] = json!(args.out.display().to_string());
    if !cv_json.is_null() {
        out["cv"] = cv_json;
    }
    println!("{}", serde_json::to_string_pretty(&out).map_err(runtime)?);
    Ok(())
}

fn train_multiclass_checked(
    source: &Dataset,
    target: &Dataset,
    hyper: &Hyperparams,
    strategy: MulticlassStrategy,
) -> Result<MulticlassModel, CliError> {
    crate::classifier::train_multiclass(source, target, hyper, strategy).map_err(runtime)
}

fn cmd_predict(args: &PredictArgs) -> CliResult {
    let model = MulticlassModel::load(&args.model).map_err(runtime)?;
    let spec = match args.format {
        FormatArg::Libsvm => FileSpec::libsvm(&args.input),
        FormatArg::Csv => FileSpec {
            path: args.input.clone(),
            format: data::Format::Csv,
            label_column: 0,
            has_header: args.has_header,
        },
    };
    let rows = read_feature_rows(&spec, model.dim()).map_err(runtime)?;
    let boundary: Domain = args.boundary.into();

    let mut out = String::from("label");
    for k in 0..model.class_count {
        out.push_str(&format!(",score_{k}"));
    }
    out.push('\n');
    for row in &rows {
        let label = model.decode_raw(row, boundary).map_err(runtime)?;
        let scores = model.scores(row, boundary).map_err(runtime)?;
        out.push_str(&format!("{label}"));
        for s in scores {
            out.push_str(&format!(",{s}"));
        }
        out.push('\n');
    }
    write_file(&args.out, &out)
}

fn cmd_eval(args: &EvalArgs) -> CliResult {
    let model = MulticlassModel::load(&args.model).map_err(runtime)?;
    let spec = args.format.file_spec(&args.data);
    let ds = load_labeled(&spec, Domain::Target)?;
    if ds.dim() > model.dim() {
        return Err(runtime(format!(
            "data dimension {} exceeds model dimension {}",
            ds.dim(),
            model.dim()
        )));
    }
    let mut correct = 0usize;
    let boundary: Domain = args.boundary.into();
    for s in ds.samples() {
        let raw = ds.raw_label_of(s.label);
        let Some(_) = model.raw_labels.iter().position(|&l| l == raw) else {
            return Err(runtime(format!("label {raw} unknown to the model")));
        };
        let mut features = s.features.clone();
        features.resize(model.dim(), 0.0);
        if model.decode_raw(&features, boundary).map_err(runtime)? == raw {
            correct += 1;
        }
    }
    let accuracy = correct as f64 / ds.len() as f64;
    println!("{}", json!({ "accuracy": accuracy, "n_test": ds.len() }));
    Ok(())
}

fn cmd_cv(args: &CvArgs) -> CliResult {
    let source_spec = args.format.file_spec(&args.source);
    let target_spec = args.format.file_spec(&args.target);
    let (source, target) = data::load_two_domains(&source_spec, &target_spec).map_err(runtime)?;
    let grid = load_grid(&args.grid)?;
    let base = Hyperparams {
        tol: args.tol,
        max_epochs: args.max_epochs,
        seed: args.seed,
        ..Hyperparams::default()
    };
    let cv = loo_cv(&source, &target, &grid, args.strategy.into(), &base).map_err(runtime)?;
    if let Some(path) = &args.table_out {
        write_file(path, &cv.table_csv())?;
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "best": {
                "lambda": cv.best.lambda,
                "c_source": cv.best.c_source,
                "c_target": cv.best.c_target,
            },
            "fold_count": cv.fold_count,
            "grid_points": cv.table.len(),
        }))
        .map_err(runtime)?
    );
    Ok(())
}

fn cmd_experiment(args: &ExperimentArgs) -> CliResult {
    let config = load_config(&args.config)?;
    fs::create_dir_all(&args.out_dir).map_err(|e| runtime(Error::io(&args.out_dir, e)))?;
    eprintln!(
        "running {} splits x {} methods...",
        config.n_splits,
        config.methods.len()
    );
    let report = run_experiment(&config).map_err(runtime)?;
    let json_path = args.out_dir.join("report.json");
    let csv_path = args.out_dir.join("splits.csv");
    write_file(&json_path, &report.to_json().map_err(runtime)?)?;
    write_file(&csv_path, &report.splits_csv())?;

    let summary: Vec<serde_json::Value> = report
        .methods
        .iter()
        .map(|m| {
            json!({
                "method": m.method.display_name(),
                "mean_accuracy": m.mean_accuracy,
                "stderr": m.stderr,
            })
        })
        .collect();
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "report": json_path.display().to_string(),
            "splits": csv_path.display().to_string(),
            "methods": summary,
        }))
        .map_err(runtime)?
    );
    Ok(())
}

fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    ExperimentConfig::load(path).map_err(|e| match e {
        Error::InvalidInput(_) | Error::Json(_) => usage(e),
        other => runtime(other),
    })
}

fn cmd_sweep(args: &SweepArgs) -> CliResult {
    let config = load_config(&args.config)?;
    let result = run_sweep(&config, args.axis.into(), &args.values).map_err(runtime)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    write_file(&args.out, &result.to_csv())?;
    println!(
        "{}",
        json!({ "out": args.out.display().to_string(), "rows": result.rows.len(), "skipped": result.warnings.len() })
    );
    Ok(())
}

fn cmd_gen(args: &GenArgs) -> CliResult {
    let text = fs::read_to_string(&args.spec).map_err(|e| runtime(Error::io(&args.spec, e)))?;
    let spec: SyntheticSpec = serde_json::from_str(&text).map_err(usage)?;
    let pool = make_shifted_gaussians(&spec, args.seed).map_err(usage)?;
    let source = pool.domain_subset(Domain::Source);
    let target = pool.domain_subset(Domain::Target);
    save_libsvm(&source, &args.out_source).map_err(runtime)?;
    save_libsvm(&target, &args.out_target).map_err(runtime)?;
    println!(
        "{}",
        json!({
            "source": { "path": args.out_source.display().to_string(), "samples": source.len() },
            "target": { "path": args.out_target.display().to_string(), "samples": target.len() },
            "dim": pool.dim(),
            "classes": pool.class_count(),
        })
    );
    Ok(())
}

/// Runs one parsed command.
pub fn execute(cli: Cli) -> CliResult {
    match &cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Cv(a) => cmd_cv(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Gen(a) => cmd_gen(a),
    }
}

/// Full entry point used by the binary: parse, configure threads, run,
/// map errors to exit codes.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap exits 0 for --help/--version, 2 for usage errors
            e.exit();
        }
    };
    if let Some(n) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
