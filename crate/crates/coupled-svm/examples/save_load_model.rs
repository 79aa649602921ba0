//! Persist a trained multiclass model as versioned JSON and reload it for
//! prediction.
//!
//! ```bash
//! cargo run --release --example save_load_model
//! ```

use coupled_svm::classifier::MulticlassModel;
use coupled_svm::data::{ClassSpec, SyntheticSpec};
use coupled_svm::{
    make_shifted_gaussians, train_multiclass, Domain, Hyperparams, MulticlassStrategy,
};

fn main() -> coupled_svm::Result<()> {
    let spec = SyntheticSpec {
        classes: vec![
            ClassSpec {
                mean: vec![2.0, 1.0],
                cov: None,
            },
            ClassSpec {
                mean: vec![-2.0, 1.0],
                cov: None,
            },
            ClassSpec {
                mean: vec![0.0, -2.0],
                cov: None,
            },
        ],
        rotation_deg: 15.0,
        translation: None,
        n_source_per_class: 30,
        n_target_per_class: 8,
    };
    let pool = make_shifted_gaussians(&spec, 5)?;
    let source = pool.domain_subset(Domain::Source);
    let target = pool.domain_subset(Domain::Target);

    let hyper = Hyperparams {
        lambda: 5.0,
        ..Hyperparams::default()
    };
    let model = train_multiclass(&source, &target, &hyper, MulticlassStrategy::OneVsOne)?;
    println!(
        "trained one-vs-one model: {} binaries for {} classes",
        model.binaries.len(),
        model.class_count
    );

    let dir = std::env::temp_dir().join("coupled-svm-example");
    std::fs::create_dir_all(&dir).expect("create output dir");
    let slim = dir.join("model.json");
    let full = dir.join("model-with-alphas.json");
    model.save(&slim, false)?;
    model.save(&full, true)?;
    let slim_len = std::fs::metadata(&slim).expect("stat").len();
    let full_len = std::fs::metadata(&full).expect("stat").len();
    println!(
        "saved {} ({slim_len} bytes) and {} ({full_len} bytes)",
        slim.display(),
        full.display()
    );

    let loaded = MulticlassModel::load(&slim)?;
    let mut agree = 0;
    for s in target.samples() {
        let a = model.decode(&s.features, Domain::Target)?;
        let b = loaded.decode(&s.features, Domain::Target)?;
        if a == b {
            agree += 1;
        }
    }
    println!(
        "reloaded model agrees on {agree}/{} target samples (raw labels: {:?})",
        target.len(),
        loaded.raw_labels
    );
    Ok(())
}
