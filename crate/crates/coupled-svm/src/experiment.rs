//! Repeated-split experiments and sample-count sweeps.
//!
//! A single JSON config describes the data (files or a synthetic spec),
//! preprocessing, the per-class sampling protocol, the methods to compare,
//! and the hyperparameter grid. Every random draw descends from
//! `base_seed`, so a rerun reproduces the report byte for byte.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{
    train_multiclass, train_multiclass_baseline, BaselineMode, Hyperparams, MulticlassStrategy,
    SolverSettings,
};
use crate::data::{
    apply_pca, apply_standardizer, fit_pca, fit_standardizer, load_two_domains,
    make_shifted_gaussians, sample_split, Dataset, Domain, FileSpec, SyntheticSpec,
};
use crate::error::{Error, Result};
use crate::model_selection::{loo_cv, HyperGrid};

const REPORT_FORMAT_VERSION: u32 = 1;

/// Methods the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Plain SVM on target training data.
    SvmT,
    /// Plain SVM on source training data.
    SvmS,
    /// Plain SVM on the union of both training sets.
    SvmSt,
    /// The coupled model, tuned by leave-one-out cross-validation.
    Csvm,
}

impl Method {
    pub fn display_name(&self) -> &'static str {
        match self {
            Method::SvmT => "SVM(T)",
            Method::SvmS => "SVM(S)",
            Method::SvmSt => "SVM(S+T)",
            Method::Csvm => "C-SVM",
        }
    }

    /// Which boundary classifies test data for this method.
    fn eval_boundary(&self) -> Domain {
        match self {
            Method::SvmS => Domain::Source,
            _ => Domain::Target,
        }
    }
}

/// Where the two domains come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSpec {
    Synthetic(SyntheticSpec),
    Files { source: FileSpec, target: FileSpec },
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    /// Standardize features with statistics fitted on the training union.
    #[serde(default = "default_true")]
    pub standardize: bool,
    /// Reduce to this many principal components (fitted on the training
    /// union, after standardization).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pca: Option<usize>,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            standardize: true,
            pca: None,
        }
    }
}

fn default_tol() -> f64 {
    1e-6
}

fn default_max_epochs() -> usize {
    1000
}

/// Solver settings shared by every training in the experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_epochs")]
    pub max_epochs: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: default_tol(),
            max_epochs: default_max_epochs(),
        }
    }
}

fn default_strategy() -> MulticlassStrategy {
    MulticlassStrategy::OneVsAll
}

fn default_baseline_cost() -> f64 {
    1.0
}

fn default_grid() -> HyperGrid {
    HyperGrid::default_grid()
}

/// One experiment: data, protocol, methods, tuning grid, seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub data: DataSpec,
    #[serde(default)]
    pub preprocess: PreprocessConfig,
    pub n_source_per_class: usize,
    pub n_target_per_class: usize,
    pub n_splits: usize,
    pub methods: Vec<Method>,
    #[serde(default = "default_strategy")]
    pub strategy: MulticlassStrategy,
    /// Grid searched by leave-one-out CV for the coupled method.
    #[serde(default = "default_grid")]
    pub grid: HyperGrid,
    /// Fixed misclassification cost for the three baselines; only the
    /// coupled method is tuned by cross-validation.
    #[serde(default = "default_baseline_cost")]
    pub baseline_cost: f64,
    #[serde(default)]
    pub solver: SolverConfig,
    pub base_seed: u64,
}

impl ExperimentConfig {
    /// Reads a config file; relative data paths are resolved against the
    /// config file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config: ExperimentConfig = serde_json::from_str(&text)?;
        if let Some(dir) = path.parent() {
            if let DataSpec::Files { source, target } = &mut config.data {
                for spec in [source, target] {
                    if spec.path.is_relative() {
                        spec.path = dir.join(&spec.path);
                    }
                }
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_splits == 0 {
            return Err(Error::invalid("n_splits must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(Error::invalid("methods must not be empty"));
        }
        if self.n_source_per_class == 0 || self.n_target_per_class == 0 {
            return Err(Error::invalid("per-class sample counts must be at least 1"));
        }
        if !(self.baseline_cost.is_finite() && self.baseline_cost > 0.0) {
            return Err(Error::invalid("baseline_cost must be finite and positive"));
        }
        if !(self.solver.tol.is_finite() && self.solver.tol > 0.0) {
            return Err(Error::invalid("solver tol must be finite and positive"));
        }
        if self.solver.max_epochs == 0 {
            return Err(Error::invalid("solver max_epochs must be at least 1"));
        }
        if let Some(p) = self.preprocess.pca {
            if p == 0 {
                return Err(Error::invalid("pca dimension must be at least 1"));
            }
        }
        self.grid.validate()?;
        Ok(())
    }

    /// Materializes the full data pool the splits are drawn from.
    pub fn materialize(&self) -> Result<Dataset> {
        match &self.data {
            DataSpec::Synthetic(spec) => make_shifted_gaussians(spec, self.base_seed),
            DataSpec::Files { source, target } => {
                let (src, tgt) = load_two_domains(source, target)?;
                let dim = src.dim();
                let raw = src.raw_labels().to_vec();
                let samples = src.samples().iter().chain(tgt.samples()).cloned().collect();
                Dataset::new(samples, dim, raw)
            }
        }
    }
}

/// Hyperparameters chosen by cross-validation for one split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChosenHyper {
    pub lambda: f64,
    pub c_source: f64,
    pub c_target: f64,
}

/// One method's result on one split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitOutcome {
    pub split: usize,
    pub seed: u64,
    pub accuracy: f64,
    /// Present only for the cross-validated coupled method.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hyper: Option<ChosenHyper>,
    /// Wall-clock seconds; kept out of the report JSON so reruns stay
    /// byte-identical, but written to the per-split CSV.
    #[serde(skip, default)]
    pub runtime_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: Method,
    pub mean_accuracy: f64,
    /// Standard error of the mean over splits.
    pub stderr: f64,
    pub splits: Vec<SplitOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub format_version: u32,
    pub config: ExperimentConfig,
    pub methods: Vec<MethodReport>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Flat per-split rows:
    /// `split,seed,method,accuracy,lambda,c_source,c_target,runtime_seconds`.
    /// Hyperparameter columns stay empty for the untuned baselines.
    pub fn splits_csv(&self) -> String {
        let mut out =
            String::from("split,seed,method,accuracy,lambda,c_source,c_target,runtime_seconds\n");
        for m in &self.methods {
            for s in &m.splits {
                let (l, cs, ct) = match &s.hyper {
                    Some(h) => (
                        h.lambda.to_string(),
                        h.c_source.to_string(),
                        h.c_target.to_string(),
                    ),
                    None => (String::new(), String::new(), String::new()),
                };
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    s.split,
                    s.seed,
                    m.method.display_name(),
                    s.accuracy,
                    l,
                    cs,
                    ct,
                    s.runtime_seconds
                ));
            }
        }
        out
    }
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn preprocess(
    config: &ExperimentConfig,
    train: Dataset,
    test: Dataset,
) -> Result<(Dataset, Dataset)> {
    let (mut train, mut test) = (train, test);
    if config.preprocess.standardize {
        let scaler = fit_standardizer(&train)?;
        train = apply_standardizer(&scaler, &train)?;
        test = apply_standardizer(&scaler, &test)?;
    }
    if let Some(p) = config.preprocess.pca {
        let pca = fit_pca(&train, p)?;
        train = apply_pca(&pca, &train)?;
        test = apply_pca(&pca, &test)?;
    }
    Ok((train, test))
}

fn run_method(
    config: &ExperimentConfig,
    method: Method,
    source: &Dataset,
    target: &Dataset,
    test: &Dataset,
    split: usize,
    seed: u64,
) -> Result<SplitOutcome> {
    let started = Instant::now();
    let solver = SolverSettings {
        tol: config.solver.tol,
        max_epochs: config.solver.max_epochs,
        seed,
    };
    let (accuracy, hyper) = match method {
        Method::SvmT | Method::SvmS | Method::SvmSt => {
            let mode = match method {
                Method::SvmT => BaselineMode::TargetOnly,
                Method::SvmS => BaselineMode::SourceOnly,
                _ => BaselineMode::Union,
            };
            let model = train_multiclass_baseline(
                mode,
                source,
                target,
                config.baseline_cost,
                &solver,
                config.strategy,
            )?;
            (model.evaluate(test, method.eval_boundary())?, None)
        }
        Method::Csvm => {
            let base = Hyperparams {
                tol: solver.tol,
                max_epochs: solver.max_epochs,
                seed,
                ..Hyperparams::default()
            };
            let cv = loo_cv(source, target, &config.grid, config.strategy, &base)?;
            let model = train_multiclass(source, target, &cv.best, config.strategy)?;
            let chosen = ChosenHyper {
                lambda: cv.best.lambda,
                c_source: cv.best.c_source,
                c_target: cv.best.c_target,
            };
            (model.evaluate(test, Domain::Target)?, Some(chosen))
        }
    };
    Ok(SplitOutcome {
        split,
        seed,
        accuracy,
        hyper,
        runtime_seconds: started.elapsed().as_secs_f64(),
    })
}

/// The split loop shared by experiments and sweeps: draws `n_splits`
/// seeded splits from `pool` with the given per-class counts and runs every
/// configured method on each.
fn run_splits(
    pool: &Dataset,
    config: &ExperimentConfig,
    n_source_per_class: usize,
    n_target_per_class: usize,
) -> Result<Vec<MethodReport>> {
    let per_split: Vec<Vec<SplitOutcome>> = (0..config.n_splits)
        .into_par_iter()
        .map(|split| {
            let seed = config.base_seed + split as u64;
            let (train, test) = sample_split(pool, n_source_per_class, n_target_per_class, seed)?;
            let (train, test) = preprocess(config, train, test)?;
            let source = train.domain_subset(Domain::Source);
            let target = train.domain_subset(Domain::Target);
            config
                .methods
                .iter()
                .map(|&m| run_method(config, m, &source, &target, &test, split, seed))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let reports = config
        .methods
        .iter()
        .enumerate()
        .map(|(mi, &method)| {
            let splits: Vec<SplitOutcome> = per_split.iter().map(|row| row[mi].clone()).collect();
            let accs: Vec<f64> = splits.iter().map(|s| s.accuracy).collect();
            let (mean_accuracy, stderr) = mean_and_stderr(&accs);
            MethodReport {
                method,
                mean_accuracy,
                stderr,
                splits,
            }
        })
        .collect();
    Ok(reports)
}

/// Runs the full repeated-split protocol described by `config`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let pool = config.materialize()?;
    let methods = run_splits(
        &pool,
        config,
        config.n_source_per_class,
        config.n_target_per_class,
    )?;
    Ok(ExperimentReport {
        format_version: REPORT_FORMAT_VERSION,
        config: config.clone(),
        methods,
    })
}

/// Which per-class count a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    SourceCount,
    TargetCount,
    /// Vary the target count and scale the source count with it, keeping
    /// the config's source:target ratio.
    Both,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::SourceCount => "source_count",
            SweepAxis::TargetCount => "target_count",
            SweepAxis::Both => "both",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: SweepAxis,
    pub count: usize,
    pub method: Method,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Count values skipped because the pool cannot supply them.
    pub warnings: Vec<String>,
}

impl SweepResult {
    /// `axis,count,method,mean,stderr` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("axis,count,method,mean,stderr\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.axis.name(),
                r.count,
                r.method.display_name(),
                r.mean,
                r.stderr
            ));
        }
        out
    }
}

/// Resolved per-class counts for one sweep point.
fn sweep_counts(config: &ExperimentConfig, axis: SweepAxis, value: usize) -> (usize, usize) {
    match axis {
        SweepAxis::SourceCount => (value, config.n_target_per_class),
        SweepAxis::TargetCount => (config.n_source_per_class, value),
        SweepAxis::Both => {
            let ratio = config.n_source_per_class as f64 / config.n_target_per_class as f64;
            let n_s = (value as f64 * ratio).round().max(1.0) as usize;
            (n_s, value)
        }
    }
}

/// Checks that every class can supply the requested counts, mirroring the
/// preconditions of `sample_split`.
fn pool_supports(pool: &Dataset, n_s: usize, n_t: usize) -> std::result::Result<(), String> {
    for class in 0..pool.class_count() {
        let have_s = pool.class_domain_count(class, Domain::Source);
        let have_t = pool.class_domain_count(class, Domain::Target);
        if have_s < n_s {
            return Err(format!(
                "class {class} has {have_s} source samples, need {n_s}"
            ));
        }
        if have_t < n_t + 1 {
            return Err(format!(
                "class {class} has {have_t} target samples, need {}",
                n_t + 1
            ));
        }
    }
    Ok(())
}

/// Runs the repeated-split loop once per count value along `axis` and
/// collects mean accuracy per method. Values the pool cannot supply are
/// skipped with a warning.
pub fn run_sweep(
    config: &ExperimentConfig,
    axis: SweepAxis,
    values: &[usize],
) -> Result<SweepResult> {
    config.validate()?;
    if values.is_empty() {
        return Err(Error::invalid("sweep needs at least one count value"));
    }
    if values.contains(&0) {
        return Err(Error::invalid("sweep counts must be at least 1"));
    }
    let pool = config.materialize()?;
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for &value in values {
        let (n_s, n_t) = sweep_counts(config, axis, value);
        if let Err(reason) = pool_supports(&pool, n_s, n_t) {
            warnings.push(format!("skipping {}={value}: {reason}", axis.name()));
            continue;
        }
        let reports = run_splits(&pool, config, n_s, n_t)?;
        for r in reports {
            rows.push(SweepRow {
                axis,
                count: value,
                method: r.method,
                mean: r.mean_accuracy,
                stderr: r.stderr,
            });
        }
    }
    Ok(SweepResult { rows, warnings })
}
