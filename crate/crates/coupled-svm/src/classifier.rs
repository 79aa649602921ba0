//! User-facing training and prediction: binary coupled models, the three
//! single-SVM baselines, and one-vs-all / one-vs-one multiclass wrappers.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::coupling::{build_gram, recover_boundaries, BoundaryPair, LiftedProblem};
use crate::data::{Dataset, Domain};
use crate::error::{Error, Result};
use crate::qp::{duality_gap, solve_box_qp, BoxQp, DenseGram, OnTheFlyGram, QpSolution};

/// Above this many training samples the Gram matrix is no longer
/// precomputed densely.
const DENSE_GRAM_LIMIT: usize = 4096;

const MODEL_FORMAT_VERSION: u32 = 1;

/// Training hyperparameters for a coupled model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    /// Coupling weight tying the two boundaries together.
    pub lambda: f64,
    /// Misclassification cost for source samples.
    pub c_source: f64,
    /// Misclassification cost for target samples.
    pub c_target: f64,
    /// Solver stopping tolerance on the projected-gradient violation.
    pub tol: f64,
    pub max_epochs: usize,
    /// Seed for the solver's coordinate permutations.
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            lambda: 1.0,
            c_source: 1.0,
            c_target: 1.0,
            tol: 1e-6,
            max_epochs: 1000,
            seed: 0,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(Error::invalid(format!(
                "lambda must be finite and >= 0, got {}",
                self.lambda
            )));
        }
        for (name, v) in [
            ("c_source", self.c_source),
            ("c_target", self.c_target),
            ("tol", self.tol),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::invalid(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        if self.max_epochs == 0 {
            return Err(Error::invalid("max_epochs must be at least 1"));
        }
        Ok(())
    }
}

/// Solver-only settings, used where the cost parameters come from
/// elsewhere (baselines, experiment configs).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub tol: f64,
    pub max_epochs: usize,
    pub seed: u64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            tol: 1e-6,
            max_epochs: 1000,
            seed: 0,
        }
    }
}

/// Optimality and geometry measurements taken right after training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDiagnostics {
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub duality_gap: f64,
    pub kkt_violation: f64,
    /// `||w_s - w_t||` over the augmented boundary vectors.
    pub coupling_distance: f64,
    pub support_vector_count: usize,
    pub epochs: usize,
    pub converged: bool,
}

/// A trained binary coupled model: both recovered boundaries plus the dual
/// variables that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledBinaryModel {
    pub boundaries: BoundaryPair,
    #[serde(default)]
    pub alphas: Vec<f64>,
    pub hyper: Hyperparams,
    pub diagnostics: ModelDiagnostics,
}

impl CoupledBinaryModel {
    pub fn dim(&self) -> usize {
        self.boundaries.dim()
    }

    /// Decision score of the selected boundary.
    pub fn score(&self, x: &[f64], boundary: Domain) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::invalid(format!(
                "input has dimension {}, model expects {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(self.boundaries.boundary(boundary).score(x))
    }

    /// `(score, label)` with `label = sign(score)` and `sign(0) = +1`.
    pub fn predict(&self, x: &[f64], boundary: Domain) -> Result<(f64, i32)> {
        let s = self.score(x, boundary)?;
        Ok((s, if s >= 0.0 { 1 } else { -1 }))
    }
}

/// Free-function form of [`CoupledBinaryModel::predict`].
pub fn predict(model: &CoupledBinaryModel, x: &[f64], boundary: Domain) -> Result<(f64, i32)> {
    model.predict(x, boundary)
}

fn solve_lifted(
    problem: &LiftedProblem,
    tol: f64,
    max_epochs: usize,
    seed: u64,
) -> Result<QpSolution> {
    if problem.n() <= DENSE_GRAM_LIMIT {
        let qp = BoxQp::new(DenseGram::new(build_gram(problem))?, problem.upper_bounds())?;
        solve_box_qp(&qp, tol, max_epochs, seed)
    } else {
        let qp = BoxQp::new(OnTheFlyGram::new(problem), problem.upper_bounds())?;
        solve_box_qp(&qp, tol, max_epochs, seed)
    }
}

fn train_from_problem(problem: &LiftedProblem, hyper: &Hyperparams) -> Result<CoupledBinaryModel> {
    let sol = solve_lifted(problem, hyper.tol, hyper.max_epochs, hyper.seed)?;
    let boundaries = recover_boundaries(problem, &sol.alphas)?;
    let gap = duality_gap(problem, &sol.alphas)?;
    let diagnostics = ModelDiagnostics {
        primal_objective: gap.primal,
        dual_objective: gap.dual,
        duality_gap: gap.gap,
        kkt_violation: sol.max_kkt_violation,
        coupling_distance: boundaries.coupling_distance(),
        support_vector_count: sol.alphas.iter().filter(|&&a| a > 0.0).count(),
        epochs: sol.epochs,
        converged: sol.converged,
    };
    Ok(CoupledBinaryModel {
        boundaries,
        alphas: sol.alphas,
        hyper: hyper.clone(),
        diagnostics,
    })
}

fn check_domain_purity(ds: &Dataset, expect: Domain, what: &str) -> Result<()> {
    if ds.samples().iter().any(|s| s.domain != expect) {
        return Err(Error::invalid(format!(
            "{what} dataset contains samples tagged with the other domain"
        )));
    }
    Ok(())
}

/// Signed training rows for a one-vs-rest split of the classes.
fn signed_rows(
    ds: &Dataset,
    positive_class: usize,
    domain: Domain,
) -> Vec<(Vec<f64>, f64, Domain)> {
    ds.samples()
        .iter()
        .map(|s| {
            let y = if s.label == positive_class { 1.0 } else { -1.0 };
            (s.features.clone(), y, domain)
        })
        .collect()
}

fn require_both_signs(rows: &[(Vec<f64>, f64, Domain)]) -> Result<()> {
    let pos = rows.iter().any(|r| r.1 > 0.0);
    let neg = rows.iter().any(|r| r.1 < 0.0);
    if !(pos && neg) {
        return Err(Error::invalid(
            "single-class problem: training data contains only one label sign",
        ));
    }
    Ok(())
}

/// Options for [`train_coupled_binary_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct TrainOptions {
    /// Permit one domain to contribute zero samples (degenerate mode used
    /// by the baselines). The combined set must still carry both signs.
    pub allow_empty_domain: bool,
}

/// Trains a binary coupled model. Samples labeled `positive_class` get
/// `y = +1`, everything else `y = -1`; source samples are bounded by
/// `c_source`, target samples by `c_target`.
pub fn train_coupled_binary(
    source: &Dataset,
    target: &Dataset,
    positive_class: usize,
    hyper: &Hyperparams,
) -> Result<CoupledBinaryModel> {
    train_coupled_binary_with(
        source,
        target,
        positive_class,
        hyper,
        TrainOptions::default(),
    )
}

/// [`train_coupled_binary`] with explicit degenerate-mode control.
pub fn train_coupled_binary_with(
    source: &Dataset,
    target: &Dataset,
    positive_class: usize,
    hyper: &Hyperparams,
    options: TrainOptions,
) -> Result<CoupledBinaryModel> {
    hyper.validate()?;
    check_domain_purity(source, Domain::Source, "source")?;
    check_domain_purity(target, Domain::Target, "target")?;
    if !options.allow_empty_domain && source.is_empty() {
        return Err(Error::invalid("source dataset is empty"));
    }
    if !options.allow_empty_domain && target.is_empty() {
        return Err(Error::invalid(
            "target dataset is empty (enable degenerate mode to train anyway)",
        ));
    }
    if !source.is_empty() && !target.is_empty() && source.dim() != target.dim() {
        return Err(Error::invalid(format!(
            "dimension mismatch: source {} vs target {}",
            source.dim(),
            target.dim()
        )));
    }
    let mut rows = signed_rows(source, positive_class, Domain::Source);
    rows.extend(signed_rows(target, positive_class, Domain::Target));
    require_both_signs(&rows)?;
    let problem = LiftedProblem::new(rows, hyper.lambda, hyper.c_source, hyper.c_target)?;
    train_from_problem(&problem, hyper)
}

/// The three single-SVM reference methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineMode {
    /// Plain SVM on the target training data alone.
    TargetOnly,
    /// Plain SVM on the source training data alone.
    SourceOnly,
    /// Plain SVM on the pooled source and target training data, trained as
    /// a single-domain problem.
    Union,
}

/// Trains one of the baselines as a special case of the coupled machinery
/// (decoupled `lambda = 0`; the unused domain stays empty, or the pool is
/// treated as one domain for [`BaselineMode::Union`]).
///
/// The meaningful boundary is the target one for `TargetOnly` and `Union`,
/// the source one for `SourceOnly`; the other boundary is zero.
pub fn train_baseline(
    mode: BaselineMode,
    source: &Dataset,
    target: &Dataset,
    positive_class: usize,
    cost: f64,
    solver: &SolverSettings,
) -> Result<CoupledBinaryModel> {
    check_domain_purity(source, Domain::Source, "source")?;
    check_domain_purity(target, Domain::Target, "target")?;
    let hyper = Hyperparams {
        lambda: 0.0,
        c_source: cost,
        c_target: cost,
        tol: solver.tol,
        max_epochs: solver.max_epochs,
        seed: solver.seed,
    };
    hyper.validate()?;
    let rows = match mode {
        BaselineMode::TargetOnly => signed_rows(target, positive_class, Domain::Target),
        BaselineMode::SourceOnly => signed_rows(source, positive_class, Domain::Source),
        BaselineMode::Union => {
            let mut rows = signed_rows(source, positive_class, Domain::Target);
            rows.extend(signed_rows(target, positive_class, Domain::Target));
            rows
        }
    };
    if rows.is_empty() {
        return Err(Error::invalid("baseline training data is empty"));
    }
    require_both_signs(&rows)?;
    let problem = LiftedProblem::new(rows, 0.0, cost, cost)?;
    train_from_problem(&problem, &hyper)
}

/// Multiclass reduction strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MulticlassStrategy {
    OneVsAll,
    OneVsOne,
}

/// What one member binary separates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinaryTask {
    /// `positive` against every other class.
    OneVsAll { positive: usize },
    /// `positive` against `negative` only (positive < negative).
    OneVsOne { positive: usize, negative: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryMember {
    pub task: BinaryTask,
    pub model: CoupledBinaryModel,
}

/// A collection of binary models with a decoding rule and the label
/// mapping back to raw label values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MulticlassModel {
    #[serde(default = "current_format_version")]
    pub format_version: u32,
    pub strategy: MulticlassStrategy,
    pub class_count: usize,
    /// Dense id -> raw label value.
    pub raw_labels: Vec<f64>,
    pub binaries: Vec<BinaryMember>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

fn current_format_version() -> u32 {
    MODEL_FORMAT_VERSION
}

/// Ties go to the lowest index.
fn argmax_lowest(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

fn multiclass_preflight(
    source: &Dataset,
    target: &Dataset,
    require_source_classes: bool,
) -> Result<usize> {
    if source.class_count() != target.class_count() || source.raw_labels() != target.raw_labels() {
        return Err(Error::invalid(
            "source and target use different label encodings",
        ));
    }
    let k = source.class_count();
    if k < 2 {
        return Err(Error::invalid(format!("need at least 2 classes, got {k}")));
    }
    if require_source_classes {
        let mut present = vec![false; k];
        for s in source.samples() {
            present[s.label] = true;
        }
        if present.iter().filter(|&&p| p).count() < 2 {
            return Err(Error::invalid(
                "source data must contain at least 2 classes",
            ));
        }
        for t in target.samples() {
            if !present[t.label] {
                return Err(Error::invalid(format!(
                    "target class {} (raw label {}) missing from source data",
                    t.label,
                    target.raw_label_of(t.label)
                )));
            }
        }
    }
    Ok(k)
}

fn class_subset(ds: &Dataset, a: usize, b: usize) -> Dataset {
    let idx: Vec<usize> = ds
        .samples()
        .iter()
        .enumerate()
        .filter(|(_, s)| s.label == a || s.label == b)
        .map(|(i, _)| i)
        .collect();
    ds.take(&idx)
}

fn assemble_multiclass<F>(
    source: &Dataset,
    target: &Dataset,
    k: usize,
    strategy: MulticlassStrategy,
    mut train_one: F,
) -> Result<MulticlassModel>
where
    F: FnMut(&Dataset, &Dataset, usize) -> Result<CoupledBinaryModel>,
{
    let mut binaries = Vec::new();
    let mut warnings = Vec::new();
    match strategy {
        MulticlassStrategy::OneVsAll => {
            for positive in 0..k {
                if target.class_domain_count(positive, Domain::Target) == 0 && !target.is_empty() {
                    warnings.push(format!(
                        "class {} (raw label {}) has no target training samples",
                        positive,
                        source.raw_label_of(positive)
                    ));
                }
                let model = train_one(source, target, positive)?;
                binaries.push(BinaryMember {
                    task: BinaryTask::OneVsAll { positive },
                    model,
                });
            }
        }
        MulticlassStrategy::OneVsOne => {
            for positive in 0..k {
                for negative in (positive + 1)..k {
                    let src = class_subset(source, positive, negative);
                    let tgt = class_subset(target, positive, negative);
                    if tgt.is_empty() && !target.is_empty() {
                        warnings.push(format!(
                            "pair ({positive}, {negative}): no target training samples"
                        ));
                    }
                    let model = train_one(&src, &tgt, positive)?;
                    binaries.push(BinaryMember {
                        task: BinaryTask::OneVsOne { positive, negative },
                        model,
                    });
                }
            }
        }
    }
    Ok(MulticlassModel {
        format_version: MODEL_FORMAT_VERSION,
        strategy,
        class_count: k,
        raw_labels: source.raw_labels().to_vec(),
        binaries,
        warnings,
    })
}

/// Trains a coupled model per binary task. Binaries with no target samples
/// for their positive class still train (the source anchors them) and
/// leave a warning on the model.
pub fn train_multiclass(
    source: &Dataset,
    target: &Dataset,
    hyper: &Hyperparams,
    strategy: MulticlassStrategy,
) -> Result<MulticlassModel> {
    let k = multiclass_preflight(source, target, true)?;
    assemble_multiclass(source, target, k, strategy, |src, tgt, positive| {
        train_coupled_binary_with(
            src,
            tgt,
            positive,
            hyper,
            TrainOptions {
                allow_empty_domain: true,
            },
        )
    })
}

/// Trains one of the single-SVM baselines per binary task.
pub fn train_multiclass_baseline(
    mode: BaselineMode,
    source: &Dataset,
    target: &Dataset,
    cost: f64,
    solver: &SolverSettings,
    strategy: MulticlassStrategy,
) -> Result<MulticlassModel> {
    let k = multiclass_preflight(source, target, false)?;
    assemble_multiclass(source, target, k, strategy, |src, tgt, positive| {
        train_baseline(mode, src, tgt, positive, cost, solver)
    })
}

impl MulticlassModel {
    pub fn dim(&self) -> usize {
        self.binaries.first().map_or(0, |b| b.model.dim())
    }

    /// Per-class decision values: raw boundary scores for one-vs-all, vote
    /// counts for one-vs-one.
    pub fn scores(&self, x: &[f64], boundary: Domain) -> Result<Vec<f64>> {
        let mut scores = vec![0.0; self.class_count];
        match self.strategy {
            MulticlassStrategy::OneVsAll => {
                for member in &self.binaries {
                    let BinaryTask::OneVsAll { positive } = member.task else {
                        return Err(Error::invalid("one_vs_all model holds a pair task"));
                    };
                    scores[positive] = member.model.score(x, boundary)?;
                }
            }
            MulticlassStrategy::OneVsOne => {
                for member in &self.binaries {
                    let BinaryTask::OneVsOne { positive, negative } = member.task else {
                        return Err(Error::invalid("one_vs_one model holds an one_vs_all task"));
                    };
                    let s = member.model.score(x, boundary)?;
                    if s >= 0.0 {
                        scores[positive] += 1.0;
                    } else {
                        scores[negative] += 1.0;
                    }
                }
            }
        }
        Ok(scores)
    }

    /// Decoded dense class id.
    pub fn decode(&self, x: &[f64], boundary: Domain) -> Result<usize> {
        match self.strategy {
            MulticlassStrategy::OneVsAll => Ok(argmax_lowest(&self.scores(x, boundary)?)),
            MulticlassStrategy::OneVsOne => {
                let mut votes = vec![0.0f64; self.class_count];
                let mut sums = vec![0.0f64; self.class_count];
                for member in &self.binaries {
                    let BinaryTask::OneVsOne { positive, negative } = member.task else {
                        return Err(Error::invalid("one_vs_one model holds an one_vs_all task"));
                    };
                    let s = member.model.score(x, boundary)?;
                    if s >= 0.0 {
                        votes[positive] += 1.0;
                    } else {
                        votes[negative] += 1.0;
                    }
                    sums[positive] += s;
                    sums[negative] -= s;
                }
                let top_votes = votes.iter().fold(0.0f64, |m, &v| m.max(v));
                // among vote-tied classes pick the larger summed score,
                // then the lowest id
                let mut best: Option<usize> = None;
                for c in 0..self.class_count {
                    if votes[c] == top_votes {
                        match best {
                            None => best = Some(c),
                            Some(b) if sums[c] > sums[b] => best = Some(c),
                            _ => {}
                        }
                    }
                }
                Ok(best.expect("at least one class"))
            }
        }
    }

    /// Decoded raw label value.
    pub fn decode_raw(&self, x: &[f64], boundary: Domain) -> Result<f64> {
        Ok(self.raw_labels[self.decode(x, boundary)?])
    }

    /// Fraction of test samples whose decoded label matches.
    pub fn evaluate(&self, test: &Dataset, boundary: Domain) -> Result<f64> {
        if test.is_empty() {
            return Err(Error::invalid("cannot evaluate on an empty test set"));
        }
        let mut correct = 0usize;
        for s in test.samples() {
            if self.decode(&s.features, boundary)? == s.label {
                correct += 1;
            }
        }
        Ok(correct as f64 / test.len() as f64)
    }

    /// Writes the model as versioned JSON. `include_alphas = false` drops
    /// the dual variables to keep files small; boundaries always survive.
    pub fn save(&self, path: impl AsRef<Path>, include_alphas: bool) -> Result<()> {
        let path = path.as_ref();
        let mut doc = self.clone();
        doc.format_version = MODEL_FORMAT_VERSION;
        if !include_alphas {
            for member in &mut doc.binaries {
                member.model.alphas.clear();
            }
        }
        let json = serde_json::to_string_pretty(&doc)?;
        fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let model: MulticlassModel = serde_json::from_str(&text)?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::invalid(format!(
                "unsupported model format version {} (expected {})",
                model.format_version, MODEL_FORMAT_VERSION
            )));
        }
        let expected = match model.strategy {
            MulticlassStrategy::OneVsAll => model.class_count,
            MulticlassStrategy::OneVsOne => model.class_count * (model.class_count - 1) / 2,
        };
        if model.binaries.len() != expected {
            return Err(Error::invalid(format!(
                "model holds {} binaries, expected {expected}",
                model.binaries.len()
            )));
        }
        Ok(model)
    }
}

/// Free-function form of [`MulticlassModel::evaluate`].
pub fn evaluate(model: &MulticlassModel, test: &Dataset, boundary: Domain) -> Result<f64> {
    model.evaluate(test, boundary)
}

#[cfg(test)]
mod tests;
