//! Coupled linear SVMs for supervised domain adaptation.
//!
//! Trains a source and a target linear SVM jointly, penalizing the
//! difference between their decision boundaries. The joint problem reduces
//! to a single box-constrained SVM dual solved by coordinate descent, so a
//! handful of labeled target samples can lean on plentiful source data
//! without overfitting.
//!
//! The main entry points:
//!
//! - [`data`] — loading (libsvm/CSV), synthetic two-domain generation,
//!   standardization, PCA, per-class train/test splits.
//! - [`coupling`] — the reduction itself: coupling coefficients, the
//!   effective inner product, Gram assembly, boundary recovery, plus a
//!   dense reference path used for verification.
//! - [`qp`] — the box-constrained dual solver and its optimality
//!   certificates (KKT violation, duality gap).
//! - [`classifier`] — binary and multiclass training, the three single-SVM
//!   baselines, prediction, evaluation, model JSON serialization.
//! - [`model_selection`] — leave-one-out cross-validation over the target
//!   training samples.
//! - [`experiment`] — repeated-split experiment harness and sample-count
//!   sweeps with CSV/JSON reports.
//! - [`cli`] — the `csvm` command-line front end.
//!
//! See the crate `examples/` directory for one runnable example per
//! capability.

pub mod classifier;
pub mod cli;
pub mod coupling;
pub mod data;
pub mod error;
pub mod experiment;
pub mod model_selection;
pub mod qp;

#[cfg(test)]
pub(crate) mod test_util;

pub use classifier::{
    evaluate, predict, train_baseline, train_coupled_binary, train_multiclass, BaselineMode,
    CoupledBinaryModel, Hyperparams, ModelDiagnostics, MulticlassModel, MulticlassStrategy,
};
pub use coupling::{
    build_gram, coupled_inner_product, recover_boundaries, BoundaryPair, CouplingCoefficients,
    LiftedProblem, LinearBoundary,
};
pub use data::{
    apply_pca, apply_standardizer, fit_pca, fit_standardizer, load_csv, load_libsvm,
    make_shifted_gaussians, sample_split, save_libsvm, Dataset, Domain, LabeledSample, PcaModel,
    ScalerParams, SyntheticSpec,
};
pub use error::{Error, Result};
pub use model_selection::{loo_cv, CvResult, HyperGrid};
pub use qp::{
    duality_gap, hinge_losses, kkt_violation, solve_box_qp, BoxQp, DenseGram, DualityGap,
    QpSolution,
};
