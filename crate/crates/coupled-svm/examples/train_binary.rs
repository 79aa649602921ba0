//! Train one binary coupled model and inspect both recovered boundaries
//! and the optimality diagnostics.
//!
//! ```bash
//! cargo run --release --example train_binary
//! ```

use coupled_svm::data::{ClassSpec, SyntheticSpec};
use coupled_svm::{make_shifted_gaussians, train_coupled_binary, Domain, Hyperparams};

fn main() -> coupled_svm::Result<()> {
    let spec = SyntheticSpec {
        classes: vec![
            ClassSpec {
                mean: vec![2.0, 0.0],
                cov: None,
            },
            ClassSpec {
                mean: vec![-2.0, 0.0],
                cov: None,
            },
        ],
        rotation_deg: 25.0,
        translation: None,
        n_source_per_class: 40,
        n_target_per_class: 6,
    };
    let pool = make_shifted_gaussians(&spec, 7)?;
    let source = pool.domain_subset(Domain::Source);
    let target = pool.domain_subset(Domain::Target);

    let hyper = Hyperparams {
        lambda: 2.0,
        c_source: 1.0,
        c_target: 10.0,
        tol: 1e-8,
        max_epochs: 10_000,
        seed: 0,
    };
    let model = train_coupled_binary(&source, &target, 0, &hyper)?;

    let b = &model.boundaries;
    println!(
        "source boundary: w = ({:+.4}, {:+.4}), b = {:+.4}",
        b.source.weights[0], b.source.weights[1], b.source.bias
    );
    println!(
        "target boundary: w = ({:+.4}, {:+.4}), b = {:+.4}",
        b.target.weights[0], b.target.weights[1], b.target.bias
    );

    let d = &model.diagnostics;
    println!("epochs:            {}", d.epochs);
    println!("converged:         {}", d.converged);
    println!(
        "support vectors:   {} of {}",
        d.support_vector_count,
        model.alphas.len()
    );
    println!("primal objective:  {:.6}", d.primal_objective);
    println!("dual objective:    {:.6}", d.dual_objective);
    println!("duality gap:       {:.3e}", d.duality_gap);
    println!("kkt violation:     {:.3e}", d.kkt_violation);
    println!("coupling distance: {:.4}", d.coupling_distance);

    // score a few points with each boundary
    for x in [[2.0, 0.5], [0.0, 0.0], [-2.0, -0.5]] {
        let (s_src, l_src) = model.predict(&x, Domain::Source)?;
        let (s_tgt, l_tgt) = model.predict(&x, Domain::Target)?;
        println!(
            "x = ({:+.1}, {:+.1}) -> source score {s_src:+.3} (label {l_src:+}), target score {s_tgt:+.3} (label {l_tgt:+})",
            x[0], x[1]
        );
    }
    Ok(())
}
