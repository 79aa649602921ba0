//! Standardize and PCA-reduce features before training, fitting both
//! transforms on the training union only.
//!
//! ```bash
//! cargo run --release --example preprocess_pipeline
//! ```

use coupled_svm::data::{ClassSpec, SyntheticSpec};
use coupled_svm::{
    apply_pca, apply_standardizer, fit_pca, fit_standardizer, make_shifted_gaussians, sample_split,
    train_multiclass, Domain, Hyperparams, MulticlassStrategy,
};

fn main() -> coupled_svm::Result<()> {
    // 5-D data whose informative directions are the first two coordinates;
    // the rest is correlated noise at a different scale
    let mut classes = Vec::new();
    for c in 0..3 {
        let angle = 2.0 * std::f64::consts::PI * c as f64 / 3.0;
        let mean = vec![4.0 * angle.cos(), 4.0 * angle.sin(), 50.0, -10.0, 0.0];
        let mut cov = vec![vec![0.0; 5]; 5];
        for (i, row) in cov.iter_mut().enumerate() {
            row[i] = if i < 2 { 1.0 } else { 40.0 };
        }
        cov[2][3] = 25.0;
        cov[3][2] = 25.0;
        classes.push(ClassSpec {
            mean,
            cov: Some(cov),
        });
    }
    let spec = SyntheticSpec {
        classes,
        rotation_deg: 20.0,
        translation: None,
        n_source_per_class: 50,
        n_target_per_class: 30,
    };
    let pool = make_shifted_gaussians(&spec, 17)?;
    let (train, test) = sample_split(&pool, 25, 3, 0)?;

    // fit on the union of source and target training data
    let scaler = fit_standardizer(&train)?;
    let train_std = apply_standardizer(&scaler, &train)?;
    let test_std = apply_standardizer(&scaler, &test)?;
    println!(
        "standardized {} features on {} training samples",
        train.dim(),
        train.len()
    );

    let pca = fit_pca(&train_std, 3)?;
    let train_red = apply_pca(&pca, &train_std)?;
    let test_red = apply_pca(&pca, &test_std)?;
    println!(
        "reduced {} -> {} dimensions",
        train_std.dim(),
        train_red.dim()
    );
    for (i, row) in pca.components().iter().enumerate() {
        let txt: Vec<String> = row.iter().map(|v| format!("{v:+.2}")).collect();
        println!("  component {i}: [{}]", txt.join(", "));
    }

    let hyper = Hyperparams {
        lambda: 1.0,
        ..Hyperparams::default()
    };
    let model = train_multiclass(
        &train_red.domain_subset(Domain::Source),
        &train_red.domain_subset(Domain::Target),
        &hyper,
        MulticlassStrategy::OneVsAll,
    )?;
    let acc = model.evaluate(&test_red, Domain::Target)?;
    println!("target accuracy after the pipeline: {:.1}%", 100.0 * acc);
    Ok(())
}
