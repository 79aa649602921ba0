use super::*;
use crate::coupling::LinearBoundary;
use crate::data::{make_shifted_gaussians, sample_split, ClassSpec, LabeledSample, SyntheticSpec};
use crate::test_util::seeded_rng;
use rand::Rng;

fn gaussian_pool(seed: u64, k: usize, n_s: usize, n_t: usize, rotation_deg: f64) -> Dataset {
    let classes = (0..k)
        .map(|c| {
            let angle = 2.0 * std::f64::consts::PI * c as f64 / k as f64;
            ClassSpec {
                mean: vec![3.0 * angle.cos(), 3.0 * angle.sin()],
                cov: None,
            }
        })
        .collect();
    let spec = SyntheticSpec {
        classes,
        rotation_deg,
        translation: None,
        n_source_per_class: n_s,
        n_target_per_class: n_t,
    };
    make_shifted_gaussians(&spec, seed).unwrap()
}

fn split_domains(pool: &Dataset) -> (Dataset, Dataset) {
    (
        pool.domain_subset(Domain::Source),
        pool.domain_subset(Domain::Target),
    )
}

fn tight(hyper: &mut Hyperparams) {
    hyper.tol = 1e-10;
    hyper.max_epochs = 20_000;
}

fn weight_diff(a: &LinearBoundary, b: &LinearBoundary) -> f64 {
    let mut sq = (a.bias - b.bias).powi(2);
    for (x, y) in a.weights.iter().zip(&b.weights) {
        sq += (x - y) * (x - y);
    }
    sq.sqrt()
}

/// The separable two-point source problem from the solver tests: +1 at
/// x=1, -1 at x=-1, lambda=0, c=10. Optimal source boundary w=1, b=0.
fn two_point_model() -> CoupledBinaryModel {
    let source = Dataset::with_dense_labels(
        vec![
            LabeledSample::new(vec![1.0], 0, Domain::Source),
            LabeledSample::new(vec![-1.0], 1, Domain::Source),
        ],
        1,
        2,
    )
    .unwrap();
    let target = Dataset::with_dense_labels(vec![], 1, 2).unwrap();
    let mut hyper = Hyperparams {
        lambda: 0.0,
        c_source: 10.0,
        c_target: 10.0,
        ..Hyperparams::default()
    };
    tight(&mut hyper);
    train_coupled_binary_with(
        &source,
        &target,
        0,
        &hyper,
        TrainOptions {
            allow_empty_domain: true,
        },
    )
    .unwrap()
}

#[test]
fn two_point_source_boundary_is_unit_slope() {
    let model = two_point_model();
    assert!((model.boundaries.source.weights[0] - 1.0).abs() <= 1e-8);
    assert!(model.boundaries.source.bias.abs() <= 1e-8);
    let (score, label) = model.predict(&[0.3], Domain::Source).unwrap();
    assert!((score - 0.3).abs() <= 1e-8);
    assert_eq!(label, 1);
}

#[test]
fn zero_boundary_predicts_positive() {
    let model = CoupledBinaryModel {
        boundaries: BoundaryPair {
            source: LinearBoundary::zeros(2),
            target: LinearBoundary::zeros(2),
        },
        alphas: vec![],
        hyper: Hyperparams::default(),
        diagnostics: ModelDiagnostics {
            primal_objective: 0.0,
            dual_objective: 0.0,
            duality_gap: 0.0,
            kkt_violation: 0.0,
            coupling_distance: 0.0,
            support_vector_count: 0,
            epochs: 0,
            converged: true,
        },
    };
    let (score, label) = model.predict(&[5.0, -3.0], Domain::Target).unwrap();
    assert_eq!(score, 0.0);
    assert_eq!(label, 1);
}

#[test]
fn score_is_affine_in_the_input() {
    let model = two_point_model();
    let mut rng = seeded_rng(5);
    for _ in 0..50 {
        let x = vec![rng.random_range(-4.0..4.0)];
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let s0 = model.score(&[0.0], Domain::Source).unwrap();
        let s1 = model.score(&x, Domain::Source).unwrap();
        let s2 = model.score(&x2, Domain::Source).unwrap();
        assert!(((s2 - s0) - 2.0 * (s1 - s0)).abs() <= 1e-12);
    }
}

#[test]
fn dimension_mismatch_rejected() {
    let model = two_point_model();
    assert!(model.predict(&[0.1, 0.2], Domain::Source).is_err());
}

#[test]
fn single_class_training_rejected() {
    let source = Dataset::with_dense_labels(
        vec![
            LabeledSample::new(vec![1.0], 0, Domain::Source),
            LabeledSample::new(vec![2.0], 0, Domain::Source),
        ],
        1,
        2,
    )
    .unwrap();
    let target =
        Dataset::with_dense_labels(vec![LabeledSample::new(vec![1.5], 0, Domain::Target)], 1, 2)
            .unwrap();
    let err = train_coupled_binary(&source, &target, 0, &Hyperparams::default()).unwrap_err();
    assert!(err.to_string().contains("single-class"), "{err}");
}

#[test]
fn positive_only_target_trains_when_source_anchors_negatives() {
    let pool = gaussian_pool(3, 2, 20, 0, 0.0);
    let source = pool.domain_subset(Domain::Source);
    // target holds only positive-class samples
    let target = Dataset::with_dense_labels(
        vec![
            LabeledSample::new(vec![3.1, 0.1], 0, Domain::Target),
            LabeledSample::new(vec![2.9, -0.2], 0, Domain::Target),
        ],
        2,
        2,
    )
    .unwrap();
    let model = train_coupled_binary(&source, &target, 0, &Hyperparams::default()).unwrap();
    assert!(model.diagnostics.converged);
}

#[test]
fn lambda_zero_matches_independent_target_svm() {
    for seed in [11u64, 12, 13] {
        let pool = gaussian_pool(seed, 2, 25, 15, 20.0);
        let (source, target) = split_domains(&pool);
        let hyper = Hyperparams {
            lambda: 0.0,
            c_source: 1.0,
            c_target: 2.0,
            tol: 1e-8,
            max_epochs: 20_000,
            ..Hyperparams::default()
        };
        let coupled = train_coupled_binary(&source, &target, 0, &hyper).unwrap();
        let solver = SolverSettings {
            tol: hyper.tol,
            max_epochs: hyper.max_epochs,
            seed: 7,
        };
        let alone =
            train_baseline(BaselineMode::TargetOnly, &source, &target, 0, 2.0, &solver).unwrap();

        let d = weight_diff(&coupled.boundaries.target, &alone.boundaries.target);
        assert!(d <= 1e-6, "seed {seed}: target boundary differs by {d}");

        let mut rng = seeded_rng(seed + 100);
        for _ in 0..200 {
            let x = vec![rng.random_range(-6.0..6.0), rng.random_range(-6.0..6.0)];
            let (_, a) = coupled.predict(&x, Domain::Target).unwrap();
            let (_, b) = alone.predict(&x, Domain::Target).unwrap();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn huge_lambda_matches_pooled_svm_with_halved_cost() {
    for seed in [21u64, 22] {
        // well-separated classes keep the problem separable in both domains
        let pool = gaussian_pool(seed, 2, 20, 20, 5.0);
        let (source, target) = split_domains(&pool);
        let c = 1.0;
        let mut hyper = Hyperparams {
            lambda: 1e6,
            c_source: c,
            c_target: c,
            ..Hyperparams::default()
        };
        tight(&mut hyper);
        let coupled = train_coupled_binary(&source, &target, 0, &hyper).unwrap();
        let solver = SolverSettings {
            tol: 1e-10,
            max_epochs: 20_000,
            seed: 3,
        };
        let pooled =
            train_baseline(BaselineMode::Union, &source, &target, 0, c / 2.0, &solver).unwrap();

        for side in [Domain::Source, Domain::Target] {
            let d = weight_diff(coupled.boundaries.boundary(side), &pooled.boundaries.target);
            assert!(d <= 1e-3, "seed {seed} {side:?}: differs by {d}");
        }
    }
}

#[test]
fn target_only_baseline_reproduces_two_point_alphas() {
    let target = Dataset::with_dense_labels(
        vec![
            LabeledSample::new(vec![1.0], 0, Domain::Target),
            LabeledSample::new(vec![-1.0], 1, Domain::Target),
        ],
        1,
        2,
    )
    .unwrap();
    let source = Dataset::with_dense_labels(vec![], 1, 2).unwrap();
    let solver = SolverSettings {
        tol: 1e-10,
        max_epochs: 1000,
        seed: 0,
    };
    let model =
        train_baseline(BaselineMode::TargetOnly, &source, &target, 0, 10.0, &solver).unwrap();
    assert!((model.alphas[0] - 0.5).abs() <= 1e-10);
    assert!((model.alphas[1] - 0.5).abs() <= 1e-10);
    assert!((model.boundaries.target.weights[0] - 1.0).abs() <= 1e-8);
}

#[test]
fn union_equals_source_only_on_doubled_data() {
    let pool = gaussian_pool(31, 2, 15, 0, 0.0);
    let source = pool.domain_subset(Domain::Source);
    // target: identical content, tagged target
    let target_samples: Vec<LabeledSample> = source
        .samples()
        .iter()
        .map(|s| LabeledSample::new(s.features.clone(), s.label, Domain::Target))
        .collect();
    let target = Dataset::with_dense_labels(target_samples, 2, 2).unwrap();
    // doubled source-only dataset
    let doubled_samples: Vec<LabeledSample> = source
        .samples()
        .iter()
        .chain(source.samples())
        .cloned()
        .collect();
    let doubled = Dataset::with_dense_labels(doubled_samples, 2, 2).unwrap();
    let empty_target = Dataset::with_dense_labels(vec![], 2, 2).unwrap();

    let solver = SolverSettings {
        tol: 1e-10,
        max_epochs: 20_000,
        seed: 1,
    };
    let union = train_baseline(BaselineMode::Union, &source, &target, 0, 1.0, &solver).unwrap();
    let source_only = train_baseline(
        BaselineMode::SourceOnly,
        &doubled,
        &empty_target,
        0,
        1.0,
        &solver,
    )
    .unwrap();
    let d = weight_diff(&union.boundaries.target, &source_only.boundaries.source);
    assert!(d <= 1e-6, "boundaries differ by {d}");
}

#[test]
fn source_only_ignores_target_samples() {
    let pool = gaussian_pool(41, 2, 15, 10, 30.0);
    let (source, target) = split_domains(&pool);
    let other_target = gaussian_pool(42, 2, 5, 10, 90.0).domain_subset(Domain::Target);
    let solver = SolverSettings::default();
    let a = train_baseline(BaselineMode::SourceOnly, &source, &target, 0, 1.0, &solver).unwrap();
    let b = train_baseline(
        BaselineMode::SourceOnly,
        &source,
        &other_target,
        0,
        1.0,
        &solver,
    )
    .unwrap();
    assert_eq!(a.boundaries, b.boundaries);
    assert_eq!(a.alphas, b.alphas);
}

#[test]
fn two_class_one_vs_all_binaries_mirror() {
    let pool = gaussian_pool(51, 2, 20, 10, 10.0);
    let (source, target) = split_domains(&pool);
    let hyper = Hyperparams::default();
    let model = train_multiclass(&source, &target, &hyper, MulticlassStrategy::OneVsAll).unwrap();
    assert_eq!(model.binaries.len(), 2);
    let b0 = &model.binaries[0].model.boundaries;
    let b1 = &model.binaries[1].model.boundaries;
    for (x, y) in b0.target.weights.iter().zip(&b1.target.weights) {
        assert_eq!(*x, -*y);
    }
    assert_eq!(b0.target.bias, -b1.target.bias);

    // decoded labels match the single binary model
    let single = train_coupled_binary(&source, &target, 0, &hyper).unwrap();
    let mut rng = seeded_rng(77);
    for _ in 0..100 {
        let x = vec![rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
        let decoded = model.decode(&x, Domain::Target).unwrap();
        let (_, sign) = single.predict(&x, Domain::Target).unwrap();
        let expect = if sign > 0 { 0 } else { 1 };
        assert_eq!(decoded, expect);
    }
}

#[test]
fn separated_three_class_problem_solved_by_both_strategies() {
    let pool = gaussian_pool(61, 3, 60, 40, 0.0);
    let (train, test) = sample_split(&pool, 40, 20, 0).unwrap();
    let (source, target) = split_domains(&train);
    let hyper = Hyperparams::default();
    for strategy in [MulticlassStrategy::OneVsAll, MulticlassStrategy::OneVsOne] {
        let model = train_multiclass(&source, &target, &hyper, strategy).unwrap();
        let acc = model.evaluate(&test, Domain::Target).unwrap();
        assert!(acc >= 0.95, "{strategy:?}: accuracy {acc}");
        let expected = match strategy {
            MulticlassStrategy::OneVsAll => 3,
            MulticlassStrategy::OneVsOne => 3,
        };
        assert_eq!(model.binaries.len(), expected);
    }
}

#[test]
fn missing_target_class_records_warning() {
    let pool = gaussian_pool(71, 3, 20, 5, 0.0);
    let source = pool.domain_subset(Domain::Source);
    // strip class 2 from the target training data
    let target_samples: Vec<LabeledSample> = pool
        .domain_subset(Domain::Target)
        .samples()
        .iter()
        .filter(|s| s.label != 2)
        .cloned()
        .collect();
    let target = Dataset::with_dense_labels(target_samples, 2, 3).unwrap();
    let model = train_multiclass(
        &source,
        &target,
        &Hyperparams::default(),
        MulticlassStrategy::OneVsAll,
    )
    .unwrap();
    assert_eq!(model.binaries.len(), 3);
    assert!(
        model
            .warnings
            .iter()
            .any(|w| w.contains("no target training samples")),
        "warnings: {:?}",
        model.warnings
    );
}

#[test]
fn random_boundaries_score_at_chance_level() {
    let k = 3;
    let mut rng = seeded_rng(81);
    let dummy_diag = ModelDiagnostics {
        primal_objective: 0.0,
        dual_objective: 0.0,
        duality_gap: 0.0,
        kkt_violation: 0.0,
        coupling_distance: 0.0,
        support_vector_count: 0,
        epochs: 0,
        converged: true,
    };
    let binaries = (0..k)
        .map(|positive| {
            let random_boundary = |rng: &mut rand_chacha::ChaCha8Rng| LinearBoundary {
                weights: vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
                bias: rng.random_range(-0.2..0.2),
            };
            BinaryMember {
                task: BinaryTask::OneVsAll { positive },
                model: CoupledBinaryModel {
                    boundaries: BoundaryPair {
                        source: random_boundary(&mut rng),
                        target: random_boundary(&mut rng),
                    },
                    alphas: vec![],
                    hyper: Hyperparams::default(),
                    diagnostics: dummy_diag.clone(),
                },
            }
        })
        .collect();
    let model = MulticlassModel {
        format_version: 1,
        strategy: MulticlassStrategy::OneVsAll,
        class_count: k,
        raw_labels: vec![0.0, 1.0, 2.0],
        binaries,
        warnings: vec![],
    };

    let n = 3000;
    let samples: Vec<LabeledSample> = (0..n)
        .map(|i| {
            LabeledSample::new(
                vec![rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)],
                i % k,
                Domain::Target,
            )
        })
        .collect();
    let test = Dataset::with_dense_labels(samples, 2, k).unwrap();
    let acc = model.evaluate(&test, Domain::Target).unwrap();
    assert!(
        (acc - 1.0 / k as f64).abs() < 0.05,
        "accuracy {acc} not near chance level"
    );
}

#[test]
fn decode_invariant_under_constant_score_shift() {
    let mut rng = seeded_rng(91);
    for _ in 0..200 {
        let scores: Vec<f64> = (0..5).map(|_| rng.random_range(-2.0..2.0)).collect();
        let c = rng.random_range(-10.0..10.0);
        let shifted: Vec<f64> = scores.iter().map(|s| s + c).collect();
        assert_eq!(argmax_lowest(&scores), argmax_lowest(&shifted));
    }
    // ties resolve to the lowest id
    assert_eq!(argmax_lowest(&[1.0, 1.0, 0.5]), 0);
}

#[test]
fn evaluate_matches_per_sample_predictions() {
    let pool = gaussian_pool(95, 3, 20, 10, 15.0);
    let (source, target) = split_domains(&pool);
    let model = train_multiclass(
        &source,
        &target,
        &Hyperparams::default(),
        MulticlassStrategy::OneVsOne,
    )
    .unwrap();
    let acc = model.evaluate(&target, Domain::Target).unwrap();
    let mut correct = 0;
    for s in target.samples() {
        if model.decode(&s.features, Domain::Target).unwrap() == s.label {
            correct += 1;
        }
    }
    assert_eq!(acc, correct as f64 / target.len() as f64);
}

#[test]
fn constant_predictor_scores_one_on_uniform_test_set() {
    let samples: Vec<LabeledSample> = (0..10)
        .map(|i| LabeledSample::new(vec![i as f64], 0, Domain::Target))
        .collect();
    let test = Dataset::with_dense_labels(samples, 1, 2).unwrap();
    let diag = ModelDiagnostics {
        primal_objective: 0.0,
        dual_objective: 0.0,
        duality_gap: 0.0,
        kkt_violation: 0.0,
        coupling_distance: 0.0,
        support_vector_count: 0,
        epochs: 0,
        converged: true,
    };
    // class-0 boundary always wins
    let mk = |bias: f64| CoupledBinaryModel {
        boundaries: BoundaryPair {
            source: LinearBoundary {
                weights: vec![0.0],
                bias,
            },
            target: LinearBoundary {
                weights: vec![0.0],
                bias,
            },
        },
        alphas: vec![],
        hyper: Hyperparams::default(),
        diagnostics: diag.clone(),
    };
    let model = MulticlassModel {
        format_version: 1,
        strategy: MulticlassStrategy::OneVsAll,
        class_count: 2,
        raw_labels: vec![0.0, 1.0],
        binaries: vec![
            BinaryMember {
                task: BinaryTask::OneVsAll { positive: 0 },
                model: mk(1.0),
            },
            BinaryMember {
                task: BinaryTask::OneVsAll { positive: 1 },
                model: mk(-1.0),
            },
        ],
        warnings: vec![],
    };
    assert_eq!(model.evaluate(&test, Domain::Target).unwrap(), 1.0);
}

#[test]
fn empty_test_set_rejected() {
    let pool = gaussian_pool(97, 2, 10, 5, 0.0);
    let (source, target) = split_domains(&pool);
    let model = train_multiclass(
        &source,
        &target,
        &Hyperparams::default(),
        MulticlassStrategy::OneVsAll,
    )
    .unwrap();
    let empty = Dataset::with_dense_labels(vec![], 2, 2).unwrap();
    assert!(model.evaluate(&empty, Domain::Target).is_err());
}

#[test]
fn save_load_round_trip_preserves_predictions() {
    let pool = gaussian_pool(101, 3, 20, 10, 25.0);
    let (source, target) = split_domains(&pool);
    let model = train_multiclass(
        &source,
        &target,
        &Hyperparams::default(),
        MulticlassStrategy::OneVsAll,
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();

    for include_alphas in [true, false] {
        let path = dir.path().join(format!("model-{include_alphas}.json"));
        model.save(&path, include_alphas).unwrap();
        let loaded = MulticlassModel::load(&path).unwrap();
        assert_eq!(loaded.strategy, model.strategy);
        assert_eq!(loaded.raw_labels, model.raw_labels);
        let has_alphas = loaded.binaries.iter().any(|b| !b.model.alphas.is_empty());
        assert_eq!(has_alphas, include_alphas);

        let mut rng = seeded_rng(7);
        for _ in 0..1000 {
            let x = vec![rng.random_range(-6.0..6.0), rng.random_range(-6.0..6.0)];
            assert_eq!(
                model.decode(&x, Domain::Target).unwrap(),
                loaded.decode(&x, Domain::Target).unwrap()
            );
            assert_eq!(
                model.scores(&x, Domain::Source).unwrap(),
                loaded.scores(&x, Domain::Source).unwrap()
            );
        }
    }
}

#[test]
fn trained_model_satisfies_strong_duality() {
    let pool = gaussian_pool(111, 2, 20, 10, 20.0);
    let (source, target) = split_domains(&pool);
    let mut hyper = Hyperparams {
        lambda: 2.0,
        ..Hyperparams::default()
    };
    hyper.tol = 1e-8;
    hyper.max_epochs = 10_000;
    let model = train_coupled_binary(&source, &target, 0, &hyper).unwrap();
    let d = &model.diagnostics;
    assert!(d.converged);
    assert!(
        d.duality_gap <= 1e-6 * (1.0 + d.primal_objective.abs()),
        "gap {} primal {}",
        d.duality_gap,
        d.primal_objective
    );
}

#[test]
fn boundaries_reproducible_from_stored_alphas() {
    let pool = gaussian_pool(121, 2, 15, 10, 10.0);
    let (source, target) = split_domains(&pool);
    let hyper = Hyperparams {
        lambda: 0.7,
        c_source: 1.5,
        c_target: 2.5,
        ..Hyperparams::default()
    };
    let model = train_coupled_binary(&source, &target, 0, &hyper).unwrap();

    // rebuild the lifted problem exactly as training does
    let mut rows: Vec<(Vec<f64>, f64, Domain)> = source
        .samples()
        .iter()
        .map(|s| {
            (
                s.features.clone(),
                if s.label == 0 { 1.0 } else { -1.0 },
                Domain::Source,
            )
        })
        .collect();
    rows.extend(target.samples().iter().map(|s| {
        (
            s.features.clone(),
            if s.label == 0 { 1.0 } else { -1.0 },
            Domain::Target,
        )
    }));
    let problem = LiftedProblem::new(rows, hyper.lambda, hyper.c_source, hyper.c_target).unwrap();
    let recovered = recover_boundaries(&problem, &model.alphas).unwrap();
    assert!(weight_diff(&recovered.source, &model.boundaries.source) <= 1e-10);
    assert!(weight_diff(&recovered.target, &model.boundaries.target) <= 1e-10);
}

#[test]
fn coupling_distance_shrinks_with_lambda() {
    let pool = gaussian_pool(131, 2, 20, 10, 30.0);
    let (source, target) = split_domains(&pool);
    let mut previous = f64::INFINITY;
    for lambda in [0.0, 0.1, 1.0, 10.0, 100.0] {
        let mut hyper = Hyperparams {
            lambda,
            ..Hyperparams::default()
        };
        tight(&mut hyper);
        let model = train_coupled_binary(&source, &target, 0, &hyper).unwrap();
        let dist = model.diagnostics.coupling_distance;
        assert!(
            dist <= previous + 1e-6,
            "coupling distance rose from {previous} to {dist} at lambda {lambda}"
        );
        previous = dist;
    }
}
