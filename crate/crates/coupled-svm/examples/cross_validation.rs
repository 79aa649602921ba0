//! Pick {lambda, C_s, C_t} by leave-one-out cross-validation over the
//! target training samples, then train the final model with the winner.
//!
//! ```bash
//! cargo run --release --example cross_validation
//! ```

use coupled_svm::data::{ClassSpec, SyntheticSpec};
use coupled_svm::model_selection::HyperGrid;
use coupled_svm::{
    loo_cv, make_shifted_gaussians, sample_split, train_multiclass, Domain, Hyperparams,
    MulticlassStrategy,
};

fn main() -> coupled_svm::Result<()> {
    let spec = SyntheticSpec {
        classes: vec![
            ClassSpec {
                mean: vec![2.5, 0.0],
                cov: None,
            },
            ClassSpec {
                mean: vec![-2.5, 0.0],
                cov: None,
            },
        ],
        rotation_deg: 30.0,
        translation: None,
        n_source_per_class: 40,
        n_target_per_class: 20,
    };
    let pool = make_shifted_gaussians(&spec, 31)?;
    let (train, test) = sample_split(&pool, 20, 4, 0)?;
    let source = train.domain_subset(Domain::Source);
    let target = train.domain_subset(Domain::Target);

    let grid = HyperGrid {
        lambdas: vec![0.0, 0.1, 1.0, 10.0, 100.0],
        c_sources: vec![0.1, 1.0, 10.0],
        c_targets: vec![0.1, 1.0, 10.0],
    };
    let base = Hyperparams::default();
    let strategy = MulticlassStrategy::OneVsAll;
    let cv = loo_cv(&source, &target, &grid, strategy, &base)?;

    println!(
        "searched {} grid points x {} folds = {} trainings",
        cv.table.len(),
        cv.fold_count,
        cv.trainings
    );
    println!(
        "best: lambda = {}, C_s = {}, C_t = {}",
        cv.best.lambda, cv.best.c_source, cv.best.c_target
    );

    let mut rows = cv.table.clone();
    rows.sort_by(|a, b| b.loo_accuracy.partial_cmp(&a.loo_accuracy).unwrap());
    println!("top grid points by LOO accuracy:");
    for r in rows.iter().take(5) {
        println!(
            "  lambda {:>6}  C_s {:>5}  C_t {:>5}  ->  {:.1}%",
            r.lambda,
            r.c_source,
            r.c_target,
            100.0 * r.loo_accuracy
        );
    }

    let model = train_multiclass(&source, &target, &cv.best, strategy)?;
    let acc = model.evaluate(&test, Domain::Target)?;
    println!(
        "held-out target accuracy with the tuned model: {:.1}%",
        100.0 * acc
    );
    Ok(())
}
