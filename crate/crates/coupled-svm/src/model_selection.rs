//! Leave-one-out cross-validation over the target training samples.
//!
//! Source data participates in full in every fold; only target samples are
//! held out, one at a time. Each grid point is scored by the fraction of
//! held-out target samples it classifies correctly with the target
//! boundary.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{train_multiclass, Hyperparams, MulticlassStrategy};
use crate::data::{Dataset, Domain};
use crate::error::{Error, Result};

/// Cartesian search grid. `lambdas` may include 0; costs must be positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperGrid {
    pub lambdas: Vec<f64>,
    pub c_sources: Vec<f64>,
    pub c_targets: Vec<f64>,
}

impl HyperGrid {
    /// The stock grid: six coupling weights crossed with five costs per
    /// domain, logarithmically spaced.
    pub fn default_grid() -> Self {
        HyperGrid {
            lambdas: vec![0.0, 0.01, 0.1, 1.0, 10.0, 100.0],
            c_sources: vec![0.01, 0.1, 1.0, 10.0, 100.0],
            c_targets: vec![0.01, 0.1, 1.0, 10.0, 100.0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambdas.is_empty() || self.c_sources.is_empty() || self.c_targets.is_empty() {
            return Err(Error::invalid("hyperparameter grid has an empty axis"));
        }
        for &l in &self.lambdas {
            if !l.is_finite() || l < 0.0 {
                return Err(Error::invalid(format!(
                    "grid lambda must be finite and >= 0, got {l}"
                )));
            }
        }
        for &c in self.c_sources.iter().chain(&self.c_targets) {
            if !c.is_finite() || c <= 0.0 {
                return Err(Error::invalid(format!(
                    "grid cost must be finite and > 0, got {c}"
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.lambdas.len() * self.c_sources.len() * self.c_targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid points ordered by the tie-break priority: ascending lambda,
    /// then ascending target cost, then ascending source cost. Duplicates
    /// are kept.
    pub fn points(&self) -> Vec<(f64, f64, f64)> {
        let sorted = |v: &[f64]| {
            let mut v = v.to_vec();
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            v
        };
        let lambdas = sorted(&self.lambdas);
        let c_targets = sorted(&self.c_targets);
        let c_sources = sorted(&self.c_sources);
        let mut points = Vec::with_capacity(self.len());
        for &l in &lambdas {
            for &ct in &c_targets {
                for &cs in &c_sources {
                    points.push((l, cs, ct));
                }
            }
        }
        points
    }
}

/// Mean leave-one-out accuracy of one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridScore {
    pub lambda: f64,
    pub c_source: f64,
    pub c_target: f64,
    pub loo_accuracy: f64,
}

/// Grid-search outcome. `best` maximizes `loo_accuracy`; exact ties go to
/// the smaller lambda, then the smaller target cost, then the smaller
/// source cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub best: Hyperparams,
    pub table: Vec<GridScore>,
    /// Number of folds, equal to the target training size.
    pub fold_count: usize,
    /// Total multiclass trainings performed (`|grid| * fold_count`).
    pub trainings: usize,
}

impl CvResult {
    /// `lambda,c_source,c_target,loo_accuracy` rows.
    pub fn table_csv(&self) -> String {
        let mut out = String::from("lambda,c_source,c_target,loo_accuracy\n");
        for row in &self.table {
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.lambda, row.c_source, row.c_target, row.loo_accuracy
            ));
        }
        out
    }
}

/// The leave-one-out folds over a target dataset: for each sample index,
/// the dataset with that sample removed.
pub(crate) fn loo_folds(target: &Dataset) -> Vec<(usize, Dataset)> {
    (0..target.len())
        .map(|held_out| {
            let keep: Vec<usize> = (0..target.len()).filter(|&i| i != held_out).collect();
            (held_out, target.take(&keep))
        })
        .collect()
}

/// Scores every grid point by leave-one-out accuracy over
/// `target_train` and returns the winner. `base` supplies the solver
/// settings (tolerance, epoch cap, seed) used for every training.
pub fn loo_cv(
    source_train: &Dataset,
    target_train: &Dataset,
    grid: &HyperGrid,
    strategy: MulticlassStrategy,
    base: &Hyperparams,
) -> Result<CvResult> {
    grid.validate()?;
    let n_t = target_train.len();
    if n_t < 2 {
        return Err(Error::invalid(format!(
            "leave-one-out needs at least 2 target samples, got {n_t}"
        )));
    }
    let folds = loo_folds(target_train);
    let points = grid.points();
    let trainings = AtomicUsize::new(0);

    let table: Vec<GridScore> = points
        .par_iter()
        .map(|&(lambda, c_source, c_target)| {
            let hyper = Hyperparams {
                lambda,
                c_source,
                c_target,
                tol: base.tol,
                max_epochs: base.max_epochs,
                seed: base.seed,
            };
            let mut correct = 0usize;
            for (held_out, fold_train) in &folds {
                let model = train_multiclass(source_train, fold_train, &hyper, strategy)?;
                trainings.fetch_add(1, Ordering::Relaxed);
                let sample = &target_train.samples()[*held_out];
                if model.decode(&sample.features, Domain::Target)? == sample.label {
                    correct += 1;
                }
            }
            Ok(GridScore {
                lambda,
                c_source,
                c_target,
                loo_accuracy: correct as f64 / n_t as f64,
            })
        })
        .collect::<Result<_>>()?;

    // first strict maximum in tie-break order
    let mut best_idx = 0;
    for (i, row) in table.iter().enumerate().skip(1) {
        if row.loo_accuracy > table[best_idx].loo_accuracy {
            best_idx = i;
        }
    }
    let winner = &table[best_idx];
    let best = Hyperparams {
        lambda: winner.lambda,
        c_source: winner.c_source,
        c_target: winner.c_target,
        tol: base.tol,
        max_epochs: base.max_epochs,
        seed: base.seed,
    };
    Ok(CvResult {
        best,
        table,
        fold_count: n_t,
        trainings: trainings.into_inner(),
    })
}
