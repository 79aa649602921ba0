//! Compare the coupled model against the three single-SVM baselines on a
//! rotated three-class problem with scarce target labels.
//!
//! ```bash
//! cargo run --release --example multiclass_baselines
//! ```

use coupled_svm::classifier::{train_multiclass_baseline, BaselineMode, SolverSettings};
use coupled_svm::data::{ClassSpec, SyntheticSpec};
use coupled_svm::{
    make_shifted_gaussians, sample_split, train_multiclass, Domain, Hyperparams, MulticlassStrategy,
};

fn main() -> coupled_svm::Result<()> {
    let spec = SyntheticSpec {
        classes: (0..3)
            .map(|c| {
                let angle = 2.0 * std::f64::consts::PI * c as f64 / 3.0;
                ClassSpec {
                    mean: vec![3.0 * angle.cos(), 3.0 * angle.sin()],
                    cov: None,
                }
            })
            .collect(),
        rotation_deg: 30.0,
        translation: None,
        n_source_per_class: 60,
        n_target_per_class: 40,
    };
    let pool = make_shifted_gaussians(&spec, 123)?;

    // paper-style protocol: 20 source + 3 target per class, rest for test
    let (train, test) = sample_split(&pool, 20, 3, 0)?;
    let source = train.domain_subset(Domain::Source);
    let target = train.domain_subset(Domain::Target);
    println!(
        "train: {} source + {} target, test: {} target samples",
        source.len(),
        target.len(),
        test.len()
    );

    let strategy = MulticlassStrategy::OneVsAll;
    let solver = SolverSettings::default();

    let baselines = [
        ("SVM(T)  ", BaselineMode::TargetOnly, Domain::Target),
        ("SVM(S)  ", BaselineMode::SourceOnly, Domain::Source),
        ("SVM(S+T)", BaselineMode::Union, Domain::Target),
    ];
    for (name, mode, boundary) in baselines {
        let model = train_multiclass_baseline(mode, &source, &target, 1.0, &solver, strategy)?;
        let acc = model.evaluate(&test, boundary)?;
        println!("{name} accuracy: {:.1}%", 100.0 * acc);
    }

    let hyper = Hyperparams {
        lambda: 10.0,
        c_source: 1.0,
        c_target: 1.0,
        ..Hyperparams::default()
    };
    let coupled = train_multiclass(&source, &target, &hyper, strategy)?;
    let acc = coupled.evaluate(&test, Domain::Target)?;
    println!(
        "C-SVM    accuracy: {:.1}% (lambda = {})",
        100.0 * acc,
        hyper.lambda
    );
    for w in &coupled.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
