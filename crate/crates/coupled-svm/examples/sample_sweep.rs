//! Sweep the number of target training samples per class and watch the
//! accuracy curve: scarce target data is where the coupling earns its
//! keep, and extra source data stops helping after a threshold.
//!
//! ```bash
//! cargo run --release --example sample_sweep
//! ```

use coupled_svm::data::{ClassSpec, SyntheticSpec};
use coupled_svm::experiment::{
    run_sweep, DataSpec, ExperimentConfig, Method, PreprocessConfig, SolverConfig, SweepAxis,
};
use coupled_svm::model_selection::HyperGrid;
use coupled_svm::MulticlassStrategy;

fn main() -> coupled_svm::Result<()> {
    let config = ExperimentConfig {
        data: DataSpec::Synthetic(SyntheticSpec {
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
            n_source_per_class: 80,
            n_target_per_class: 30,
        }),
        preprocess: PreprocessConfig {
            standardize: true,
            pca: None,
        },
        n_source_per_class: 20,
        n_target_per_class: 3,
        n_splits: 20,
        methods: vec![Method::SvmT, Method::Csvm],
        strategy: MulticlassStrategy::OneVsAll,
        grid: HyperGrid {
            lambdas: vec![0.0, 1.0, 10.0],
            c_sources: vec![1.0],
            c_targets: vec![1.0, 10.0],
        },
        baseline_cost: 1.0,
        solver: SolverConfig::default(),
        base_seed: 3,
    };

    for (axis, values) in [
        (SweepAxis::TargetCount, vec![1usize, 3, 5, 10]),
        (SweepAxis::SourceCount, vec![10usize, 20, 40, 70]),
    ] {
        eprintln!("sweeping {}...", axis.name());
        let result = run_sweep(&config, axis, &values)?;
        for w in &result.warnings {
            eprintln!("warning: {w}");
        }
        println!("\n{} sweep:", axis.name());
        println!(
            "{:>8} {:<10} {:>10} {:>9}",
            "count", "method", "mean acc", "stderr"
        );
        for row in &result.rows {
            println!(
                "{:>8} {:<10} {:>9.2}% {:>8.2}%",
                row.count,
                row.method.display_name(),
                100.0 * row.mean,
                100.0 * row.stderr
            );
        }
    }
    Ok(())
}
