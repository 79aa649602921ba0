//! Shared helpers for the integration suites: an independent
//! projected-gradient solver used as an optimality oracle, and random
//! problem generators.

// each test target uses its own subset of these helpers
#![allow(dead_code)]

use coupled_svm::data::{ClassSpec, SyntheticSpec};
use coupled_svm::{Dataset, Domain, LabeledSample, LiftedProblem};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Minimizes `x' Q x / 2 - 1' x` over `0 <= x <= upper` by accelerated
/// projected gradient descent with function-value restarts. Entirely
/// independent of the coordinate-descent path under test.
///
/// Returns `(x, objective)` where `objective` is the *dual* form
/// `1' x - x' Q x / 2` (the negation of the minimized function).
pub fn projected_gradient_oracle(
    q: &[Vec<f64>],
    upper: &[f64],
    residual_tol: f64,
    max_iters: usize,
) -> (Vec<f64>, f64) {
    let n = upper.len();
    assert!(q.len() == n && q.iter().all(|r| r.len() == n));
    // Gershgorin bound on the largest eigenvalue
    let lipschitz = q
        .iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(1e-12, f64::max);
    let step = 1.0 / lipschitz;

    let project = |x: &mut Vec<f64>| {
        for (xi, &ci) in x.iter_mut().zip(upper) {
            *xi = xi.clamp(0.0, ci);
        }
    };
    let gradient = |x: &[f64]| -> Vec<f64> {
        q.iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - 1.0)
            .collect()
    };
    // f(x) = x'Qx/2 - 1'x, computed from g = Qx - 1
    let value = |x: &[f64], g: &[f64]| -> f64 {
        let xg: f64 = x.iter().zip(g).map(|(a, b)| a * b).sum();
        let xs: f64 = x.iter().sum();
        0.5 * (xg - xs)
    };

    let mut x = vec![0.0; n];
    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut best_x = x.clone();
    let mut best_f = 0.0f64; // f(0) = 0
    let mut f_prev = 0.0f64;

    for _ in 0..max_iters {
        let g_y = gradient(&y);
        let mut x_next: Vec<f64> = y.iter().zip(&g_y).map(|(yi, gi)| yi - step * gi).collect();
        project(&mut x_next);
        let g_next = gradient(&x_next);
        let f_next = value(&x_next, &g_next);

        if f_next > f_prev {
            // restart the momentum from the last iterate
            t = 1.0;
            y = x.clone();
            f_prev = f64::INFINITY;
            continue;
        }

        if f_next < best_f {
            best_f = f_next;
            best_x = x_next.clone();
        }

        // fixed-point residual of the projected gradient map at x_next
        let mut residual = 0.0f64;
        for i in 0..n {
            let stepped = (x_next[i] - step * g_next[i]).clamp(0.0, upper[i]);
            residual = residual.max((stepped - x_next[i]).abs());
        }
        if residual <= residual_tol {
            best_f = best_f.min(f_next);
            best_x = x_next;
            break;
        }

        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        y = x_next
            .iter()
            .zip(&x)
            .map(|(xn, xo)| xn + beta * (xn - xo))
            .collect();
        project(&mut y);
        x = x_next;
        t = t_next;
        f_prev = f_next;
    }

    let dual = -best_f;
    (best_x, dual)
}

/// Dense rows of the Gram matrix of a lifted problem.
pub fn gram_rows(problem: &LiftedProblem) -> Vec<Vec<f64>> {
    let q = coupled_svm::build_gram(problem);
    (0..q.nrows())
        .map(|i| (0..q.ncols()).map(|j| q[(i, j)]).collect())
        .collect()
}

/// Random coupled instance mixing both domains and both labels.
pub fn random_instance(
    seed: u64,
    n: usize,
    d: usize,
    lambda: f64,
    c_source: f64,
    c_target: f64,
) -> LiftedProblem {
    let mut r = rng(seed);
    let samples: Vec<(Vec<f64>, f64, Domain)> = (0..n)
        .map(|i| {
            let x: Vec<f64> = (0..d).map(|_| r.random_range(-2.0..2.0)).collect();
            let y = match i % 4 {
                0 | 2 => 1.0,
                _ => -1.0,
            };
            let dom = if i % 2 == 0 {
                Domain::Source
            } else {
                Domain::Target
            };
            let y = if i >= 4 && r.random_bool(0.5) { -y } else { y };
            let dom = if i >= 4 && r.random_bool(0.5) {
                match dom {
                    Domain::Source => Domain::Target,
                    Domain::Target => Domain::Source,
                }
            } else {
                dom
            };
            (x, y, dom)
        })
        .collect();
    LiftedProblem::new(samples, lambda, c_source, c_target).unwrap()
}

/// Two-domain Gaussian pool: `k` classes on a circle of radius 3 with unit
/// covariance; the target domain is the source rotated by `rotation_deg`.
pub fn gaussian_pool(seed: u64, k: usize, n_s: usize, n_t: usize, rotation_deg: f64) -> Dataset {
    let spec = gaussian_spec(k, n_s, n_t, rotation_deg);
    coupled_svm::make_shifted_gaussians(&spec, seed).unwrap()
}

pub fn gaussian_spec(k: usize, n_s: usize, n_t: usize, rotation_deg: f64) -> SyntheticSpec {
    let classes = (0..k)
        .map(|c| {
            let angle = 2.0 * std::f64::consts::PI * c as f64 / k as f64;
            ClassSpec {
                mean: vec![3.0 * angle.cos(), 3.0 * angle.sin()],
                cov: None,
            }
        })
        .collect();
    SyntheticSpec {
        classes,
        rotation_deg,
        translation: None,
        n_source_per_class: n_s,
        n_target_per_class: n_t,
    }
}

/// Linearly separable two-domain binary dataset: labels follow a random
/// hyperplane with a margin of at least 0.5 on every sample.
pub fn separable_two_domain(seed: u64, n_per_domain: usize, d: usize) -> (Dataset, Dataset) {
    let mut r = rng(seed);
    let w: Vec<f64> = (0..d).map(|_| r.random_range(-1.0..1.0)).collect();
    let norm: f64 = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    let w: Vec<f64> = w.iter().map(|v| v / norm).collect();
    let b: f64 = r.random_range(-0.5..0.5);

    let mut draw = |domain: Domain| -> Vec<LabeledSample> {
        let mut out = Vec::with_capacity(n_per_domain);
        // anchors at score +2 and -2 guarantee both labels per domain
        for (t, label) in [(2.0 - b, 0usize), (-2.0 - b, 1usize)] {
            let x: Vec<f64> = w.iter().map(|wi| t * wi).collect();
            out.push(LabeledSample::new(x, label, domain));
        }
        while out.len() < n_per_domain {
            let x: Vec<f64> = (0..d).map(|_| r.random_range(-3.0..3.0)).collect();
            let score: f64 = w.iter().zip(&x).map(|(a, c)| a * c).sum::<f64>() + b;
            if score.abs() < 0.5 {
                continue;
            }
            let label = usize::from(score < 0.0);
            out.push(LabeledSample::new(x, label, domain));
        }
        out
    };
    let source = draw(Domain::Source);
    let target = draw(Domain::Target);
    (
        Dataset::with_dense_labels(source, d, 2).unwrap(),
        Dataset::with_dense_labels(target, d, 2).unwrap(),
    )
}
