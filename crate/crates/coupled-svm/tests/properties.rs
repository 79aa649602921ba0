//! Property tests over the library's core invariants.

use coupled_svm::coupling::dense;
use coupled_svm::data::{
    apply_pca, apply_standardizer, fit_pca, fit_standardizer, load_libsvm, sample_split,
    save_libsvm,
};
use coupled_svm::{
    build_gram, solve_box_qp, BoxQp, CouplingCoefficients, Dataset, DenseGram, Domain,
    LabeledSample, LiftedProblem,
};
use proptest::prelude::*;

fn feature() -> impl Strategy<Value = f64> {
    prop_oneof![
        2 => Just(0.0),
        8 => -1.0e3..1.0e3f64,
        1 => -1.0e-6..1.0e-6f64,
    ]
}

fn dataset() -> impl Strategy<Value = Dataset> {
    (1usize..5, 1usize..10)
        .prop_flat_map(|(d, n)| {
            (
                prop::collection::vec(prop::collection::vec(feature(), d), n),
                prop::collection::vec(0usize..3, n),
            )
        })
        .prop_map(|(rows, labels)| {
            let d = rows[0].len();
            let samples = rows
                .into_iter()
                .zip(labels)
                .map(|(f, l)| LabeledSample::new(f, l, Domain::Source))
                .collect();
            Dataset::with_dense_labels(samples, d, 3).unwrap()
        })
}

fn lifted_problem() -> impl Strategy<Value = LiftedProblem> {
    (2usize..16, 1usize..4, 0usize..4, 1u64..1000)
        .prop_flat_map(|(n, d, lambda_idx, seed)| {
            let lambda = [0.0, 0.3, 2.0, 20.0][lambda_idx];
            (
                prop::collection::vec(prop::collection::vec(-2.0..2.0f64, d), n),
                prop::collection::vec(prop::bool::ANY, n),
                prop::collection::vec(prop::bool::ANY, n),
                Just(lambda),
                Just(seed),
            )
        })
        .prop_map(|(rows, signs, domains, lambda, _seed)| {
            let samples = rows
                .into_iter()
                .zip(signs.iter().zip(&domains))
                .map(|(x, (&pos, &src))| {
                    let y = if pos { 1.0 } else { -1.0 };
                    let dom = if src { Domain::Source } else { Domain::Target };
                    (x, y, dom)
                })
                .collect();
            LiftedProblem::new(samples, lambda, 1.0, 2.0).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coupling_coefficient_identities(lambda in 0.0..100.0f64) {
        let c = CouplingCoefficients::new(lambda).unwrap();
        prop_assert!((c.same_domain() + c.cross_domain() - 1.0).abs() <= 1e-12);
        let expect_diff = 1.0 / (1.0 + 2.0 * lambda);
        prop_assert!((c.same_domain() - c.cross_domain() - expect_diff).abs() <= 1e-12);
        prop_assert!(c.same_domain() > 0.5 && c.same_domain() <= 1.0);
        prop_assert!((0.0..0.5).contains(&c.cross_domain()));
    }

    #[test]
    fn block_form_equals_dense_inverse(lambda in 0.0..100.0f64, d in 1usize..=8) {
        let m = dense::coupling_matrix(lambda, d).unwrap();
        let c = CouplingCoefficients::new(lambda).unwrap();
        let block = d + 1;
        for i in 0..2 * block {
            for j in 0..2 * block {
                let expect = if i == j {
                    c.same_domain()
                } else if i.abs_diff(j) == block {
                    c.cross_domain()
                } else {
                    0.0
                };
                prop_assert!((m[(i, j)] - expect).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn libsvm_write_read_round_trip(ds in dataset()) {
        let file = tempfile::NamedTempFile::new().unwrap();
        save_libsvm(&ds, file.path()).unwrap();
        let back = load_libsvm(file.path(), Domain::Source).unwrap();
        prop_assert_eq!(back.len(), ds.len());
        prop_assert_eq!(back.dim(), ds.dim());
        for (a, b) in ds.samples().iter().zip(back.samples()) {
            prop_assert_eq!(&a.features, &b.features);
            prop_assert_eq!(ds.raw_label_of(a.label), back.raw_label_of(b.label));
        }
    }

    #[test]
    fn standardizer_inverts_to_originals(ds in dataset()) {
        let params = fit_standardizer(&ds).unwrap();
        let transformed = apply_standardizer(&params, &ds).unwrap();
        for (orig, t) in ds.samples().iter().zip(transformed.samples()) {
            let back = params.invert_vec(&t.features);
            for (a, b) in orig.features.iter().zip(&back) {
                // scale-relative: inverting multiplies rounding by std
                prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
            }
        }
    }

    #[test]
    fn gram_matches_reference_and_is_symmetric(p in lifted_problem()) {
        let q = build_gram(&p);
        for i in 0..p.n() {
            for j in 0..p.n() {
                prop_assert_eq!(q[(i, j)], q[(j, i)]);
            }
        }
        let r = dense::reference_gram(&p).unwrap();
        prop_assert!((&q - &r).abs().max() <= 1e-10);
    }

    #[test]
    fn solver_stays_feasible_and_monotone(p in lifted_problem(), seed in 0u64..100) {
        let qp = BoxQp::new(DenseGram::new(build_gram(&p)).unwrap(), p.upper_bounds()).unwrap();
        let sol = solve_box_qp(&qp, 1e-8, 300, seed).unwrap();
        for (a, c) in sol.alphas.iter().zip(qp.upper()) {
            prop_assert!(*a >= 0.0 && a <= c);
        }
        for w in sol.objective_trace.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12);
        }
    }

    #[test]
    fn pca_projection_nonexpansive(rows in prop::collection::vec(prop::collection::vec(-5.0..5.0f64, 4), 6usize..20), p in 1usize..4) {
        let d = rows[0].len();
        let samples: Vec<LabeledSample> = rows
            .into_iter()
            .map(|f| LabeledSample::new(f, 0, Domain::Source))
            .collect();
        let ds = Dataset::with_dense_labels(samples, d, 1).unwrap();
        if let Ok(model) = fit_pca(&ds, p) {
            let proj = apply_pca(&model, &ds).unwrap();
            for (orig, z) in ds.samples().iter().zip(proj.samples()) {
                let centered: f64 = orig
                    .features
                    .iter()
                    .zip(model.mean())
                    .map(|(v, m)| (v - m) * (v - m))
                    .sum::<f64>()
                    .sqrt();
                let kept: f64 = z.features.iter().map(|v| v * v).sum::<f64>().sqrt();
                prop_assert!(kept <= centered + 1e-10);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn split_partitions_the_pool(seed in 0u64..1000, n_s in 1usize..10, n_t in 1usize..6) {
        let spec = coupled_svm::SyntheticSpec {
            classes: vec![
                coupled_svm::data::ClassSpec { mean: vec![1.0, 0.0], cov: None },
                coupled_svm::data::ClassSpec { mean: vec![-1.0, 0.0], cov: None },
            ],
            rotation_deg: 0.0,
            translation: None,
            n_source_per_class: 12,
            n_target_per_class: 8,
        };
        let pool = coupled_svm::make_shifted_gaussians(&spec, 5).unwrap();
        prop_assume!(n_s <= 12 && n_t < 8);
        let (train, test) = sample_split(&pool, n_s, n_t, seed).unwrap();
        prop_assert_eq!(train.n_source(), 2 * n_s);
        prop_assert_eq!(train.n_target(), 2 * n_t);
        prop_assert!(test.samples().iter().all(|s| s.domain == Domain::Target));
        prop_assert_eq!(test.len(), 2 * 8 - 2 * n_t);
        // train/test target samples are disjoint and cover the pool
        for s in pool.samples().iter().filter(|s| s.domain == Domain::Target) {
            let in_train = train.samples().iter().filter(|t| t.features == s.features).count();
            let in_test = test.samples().iter().filter(|t| t.features == s.features).count();
            prop_assert_eq!(in_train + in_test, 1);
        }
    }
}
