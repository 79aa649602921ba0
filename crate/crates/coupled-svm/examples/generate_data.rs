//! Generate a two-domain synthetic dataset, write it as libsvm files, and
//! read it back.
//!
//! ```bash
//! cargo run --release --example generate_data
//! ```

use coupled_svm::data::{ClassSpec, SyntheticSpec};
use coupled_svm::{load_libsvm, make_shifted_gaussians, save_libsvm, Domain};

fn main() -> coupled_svm::Result<()> {
    // three classes on a circle; the target domain is rotated 30 degrees
    // and shifted
    let spec = SyntheticSpec {
        classes: vec![
            ClassSpec {
                mean: vec![3.0, 0.0],
                cov: None,
            },
            ClassSpec {
                mean: vec![-1.5, 2.6],
                cov: Some(vec![vec![1.5, 0.3], vec![0.3, 0.5]]),
            },
            ClassSpec {
                mean: vec![-1.5, -2.6],
                cov: None,
            },
        ],
        rotation_deg: 30.0,
        translation: Some(vec![0.5, -0.25]),
        n_source_per_class: 50,
        n_target_per_class: 20,
    };

    let pool = make_shifted_gaussians(&spec, 42)?;
    let (n_s, n_t) = pool.domain_counts();
    println!(
        "generated {} samples ({n_s} source + {n_t} target), dim {}, {} classes",
        pool.len(),
        pool.dim(),
        pool.class_count()
    );

    let dir = std::env::temp_dir().join("coupled-svm-example");
    std::fs::create_dir_all(&dir).expect("create output dir");
    let source_path = dir.join("source.libsvm");
    let target_path = dir.join("target.libsvm");
    save_libsvm(&pool.domain_subset(Domain::Source), &source_path)?;
    save_libsvm(&pool.domain_subset(Domain::Target), &target_path)?;
    println!(
        "wrote {} and {}",
        source_path.display(),
        target_path.display()
    );

    let reloaded = load_libsvm(&source_path, Domain::Source)?;
    assert_eq!(reloaded.len(), n_s);
    assert_eq!(reloaded.dim(), pool.dim());
    println!(
        "reloaded source file: {} samples, bit-exact features",
        reloaded.len()
    );

    // per-class target means land near the transformed source means
    for (c, class) in spec.classes.iter().enumerate() {
        let expect = spec.transform(&class.mean);
        let mut mean = [0.0; 2];
        let mut count = 0.0;
        for s in pool.domain_subset(Domain::Target).samples() {
            if s.label == c {
                mean[0] += s.features[0];
                mean[1] += s.features[1];
                count += 1.0;
            }
        }
        println!(
            "class {c}: target mean ({:+.2}, {:+.2}), transformed source mean ({:+.2}, {:+.2})",
            mean[0] / count,
            mean[1] / count,
            expect[0],
            expect[1]
        );
    }
    Ok(())
}
