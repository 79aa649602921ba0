//! Sweep the coupling weight and watch the two boundaries pull together:
//! the distance ||w_s - w_t|| at the optimum is non-increasing in lambda,
//! from two independent SVMs at lambda = 0 to a single pooled boundary as
//! lambda grows.
//!
//! ```bash
//! cargo run --release --example coupling_path
//! ```

use coupled_svm::data::{ClassSpec, SyntheticSpec};
use coupled_svm::{make_shifted_gaussians, train_coupled_binary, Domain, Hyperparams};

fn main() -> coupled_svm::Result<()> {
    let spec = SyntheticSpec {
        classes: vec![
            ClassSpec {
                mean: vec![2.2, 0.0],
                cov: None,
            },
            ClassSpec {
                mean: vec![-2.2, 0.0],
                cov: None,
            },
        ],
        rotation_deg: 35.0,
        translation: None,
        n_source_per_class: 30,
        n_target_per_class: 10,
    };
    let pool = make_shifted_gaussians(&spec, 11)?;
    let source = pool.domain_subset(Domain::Source);
    let target = pool.domain_subset(Domain::Target);

    println!(
        "{:>10}  {:>18}  {:>12}  {:>12}",
        "lambda", "coupling distance", "primal", "gap"
    );
    for lambda in [0.0, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0] {
        let hyper = Hyperparams {
            lambda,
            c_source: 1.0,
            c_target: 1.0,
            tol: 1e-8,
            max_epochs: 20_000,
            seed: 1,
        };
        let model = train_coupled_binary(&source, &target, 0, &hyper)?;
        let d = &model.diagnostics;
        println!(
            "{lambda:>10.2}  {:>18.6}  {:>12.4}  {:>12.3e}",
            d.coupling_distance, d.primal_objective, d.duality_gap
        );
    }
    Ok(())
}
