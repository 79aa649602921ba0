//! Box-constrained dual solver.
//!
//! Minimizes `f(alpha) = alpha' Q alpha / 2 - 1' alpha` subject to
//! `0 <= alpha_i <= c_i` by dual coordinate descent. The dual has no
//! equality constraint because the bias is regularized inside the weight
//! vector, so exact single-coordinate minimization is valid and no pair
//! selection is needed.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coupling::{recover_boundaries, BoundaryPair, LiftedProblem};
use crate::error::{Error, Result};

/// Boundary tolerance when classifying a coordinate as at-bound.
const BOUND_EPS: f64 = 1e-12;

/// Read access to the dual Gram matrix.
pub trait QMatrix: Sync {
    fn n(&self) -> usize;
    fn entry(&self, i: usize, j: usize) -> f64;
    fn diag(&self, i: usize) -> f64 {
        self.entry(i, i)
    }
    /// `out[j] += scale * Q[i][j]` for all `j`.
    fn add_row_scaled(&self, i: usize, scale: f64, out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o += scale * self.entry(i, j);
        }
    }
}

/// Precomputed dense Gram, row-major. The default for problems that fit in
/// memory.
#[derive(Debug, Clone)]
pub struct DenseGram {
    n: usize,
    values: Vec<f64>,
}

impl DenseGram {
    pub fn new(matrix: nalgebra::DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::invalid("gram matrix must be square"));
        }
        if matrix.iter().any(|v| v.is_nan()) {
            return Err(Error::Numerical("gram matrix contains NaN".into()));
        }
        let n = matrix.nrows();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                values[i * n + j] = matrix[(i, j)];
            }
        }
        Ok(DenseGram { n, values })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("gram matrix must be square"));
        }
        let values: Vec<f64> = rows.into_iter().flatten().collect();
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Numerical("gram matrix contains NaN".into()));
        }
        Ok(DenseGram { n, values })
    }
}

impl QMatrix for DenseGram {
    fn n(&self) -> usize {
        self.n
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    fn add_row_scaled(&self, i: usize, scale: f64, out: &mut [f64]) {
        let row = &self.values[i * self.n..(i + 1) * self.n];
        for (o, &q) in out.iter_mut().zip(row) {
            *o += scale * q;
        }
    }
}

/// Gram entries computed on the fly from the lifted problem, with a cached
/// diagonal. Used above the dense size threshold.
pub struct OnTheFlyGram<'p> {
    problem: &'p LiftedProblem,
    diag: Vec<f64>,
}

impl<'p> OnTheFlyGram<'p> {
    pub fn new(problem: &'p LiftedProblem) -> Self {
        let diag = (0..problem.n()).map(|i| problem.q_entry(i, i)).collect();
        OnTheFlyGram { problem, diag }
    }
}

impl QMatrix for OnTheFlyGram<'_> {
    fn n(&self) -> usize {
        self.problem.n()
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        self.problem.q_entry(i, j)
    }

    fn diag(&self, i: usize) -> f64 {
        self.diag[i]
    }
}

/// `min alpha' Q alpha / 2 - 1' alpha  s.t.  0 <= alpha <= upper`.
pub struct BoxQp<Q: QMatrix> {
    gram: Q,
    upper: Vec<f64>,
}

impl<Q: QMatrix> BoxQp<Q> {
    pub fn new(gram: Q, upper: Vec<f64>) -> Result<Self> {
        if upper.len() != gram.n() {
            return Err(Error::invalid(format!(
                "{} upper bounds for {} variables",
                upper.len(),
                gram.n()
            )));
        }
        if upper.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
            return Err(Error::invalid("upper bounds must be finite and positive"));
        }
        Ok(BoxQp { gram, upper })
    }

    pub fn n(&self) -> usize {
        self.gram.n()
    }

    pub fn gram(&self) -> &Q {
        &self.gram
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }
}

/// Solver output. `dual_objective` is `1' alpha - alpha' Q alpha / 2`
/// recomputed from scratch at the final iterate.
#[derive(Debug, Clone)]
pub struct QpSolution {
    pub alphas: Vec<f64>,
    pub dual_objective: f64,
    pub epochs: usize,
    pub max_kkt_violation: f64,
    pub converged: bool,
    /// Dual objective at the end of each epoch.
    pub objective_trace: Vec<f64>,
}

/// Projected-gradient violation of one coordinate.
fn coordinate_violation(alpha: f64, g: f64, upper: f64) -> f64 {
    let at_lower = alpha <= BOUND_EPS;
    let at_upper = alpha >= upper - BOUND_EPS;
    match (at_lower, at_upper) {
        (true, true) => 0.0,
        (true, false) => (-g).max(0.0),
        (false, true) => g.max(0.0),
        (false, false) => g.abs(),
    }
}

fn max_violation(alphas: &[f64], g: &[f64], upper: &[f64]) -> f64 {
    alphas
        .iter()
        .zip(g)
        .zip(upper)
        .map(|((&a, &gi), &c)| coordinate_violation(a, gi, c))
        .fold(0.0, f64::max)
}

/// Dual objective from a maintained gradient `g = Q alpha - 1`:
/// `1' alpha - alpha' Q alpha / 2 = (1' alpha - alpha' g) / 2`.
fn objective_from_gradient(alphas: &[f64], g: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut dot = 0.0;
    for (&a, &gi) in alphas.iter().zip(g) {
        sum += a;
        dot += a * gi;
    }
    0.5 * (sum - dot)
}

fn exact_dual_objective<Q: QMatrix>(gram: &Q, alphas: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut quad = 0.0;
    for (i, &ai) in alphas.iter().enumerate() {
        sum += ai;
        if ai == 0.0 {
            continue;
        }
        let mut row_dot = 0.0;
        for (j, &aj) in alphas.iter().enumerate() {
            if aj != 0.0 {
                row_dot += gram.entry(i, j) * aj;
            }
        }
        quad += ai * row_dot;
    }
    sum - 0.5 * quad
}

/// Dual coordinate descent with one exact coordinate minimization per
/// visit: `alpha_i <- clip(alpha_i - g_i / Q_ii, 0, c_i)`. Coordinates are
/// visited in a fresh seed-determined random permutation each epoch; the
/// gradient is maintained incrementally. Terminates when the maximum
/// projected-gradient violation drops to `tol` or epochs run out (reported
/// via `converged`).
pub fn solve_box_qp<Q: QMatrix>(
    problem: &BoxQp<Q>,
    tol: f64,
    max_epochs: usize,
    seed: u64,
) -> Result<QpSolution> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::invalid(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if max_epochs == 0 {
        return Err(Error::invalid("max_epochs must be at least 1"));
    }
    let n = problem.n();
    let upper = problem.upper();
    let gram = problem.gram();
    for i in 0..n {
        if gram.diag(i).is_nan() {
            return Err(Error::Numerical("gram matrix contains NaN".into()));
        }
    }

    let mut alphas = vec![0.0; n];
    let mut g = vec![-1.0; n]; // gradient at alpha = 0
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trace = Vec::new();
    let mut converged = false;
    let mut epochs = 0;

    for _ in 0..max_epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let qii = gram.diag(i);
            let gi = g[i];
            let target = if qii > 0.0 {
                (alphas[i] - gi / qii).clamp(0.0, upper[i])
            } else if gi < 0.0 {
                // flat curvature: objective is linear along this coordinate
                upper[i]
            } else if gi > 0.0 {
                0.0
            } else {
                alphas[i]
            };
            let delta = target - alphas[i];
            if delta != 0.0 {
                alphas[i] = target;
                gram.add_row_scaled(i, delta, &mut g);
            }
        }
        epochs += 1;
        trace.push(objective_from_gradient(&alphas, &g));
        if max_violation(&alphas, &g, upper) <= tol {
            converged = true;
            break;
        }
    }

    let dual_objective = exact_dual_objective(gram, &alphas);
    let max_kkt_violation = kkt_violation(problem, &alphas);
    Ok(QpSolution {
        alphas,
        dual_objective,
        epochs,
        max_kkt_violation,
        converged,
        objective_trace: trace,
    })
}

/// Maximum projected-gradient violation at `alphas`, with the gradient
/// recomputed from scratch: `|g_i|` for interior coordinates,
/// `max(0, -g_i)` at the lower bound, `max(0, g_i)` at the upper bound.
pub fn kkt_violation<Q: QMatrix>(problem: &BoxQp<Q>, alphas: &[f64]) -> f64 {
    let n = problem.n();
    assert_eq!(alphas.len(), n, "alpha length mismatch");
    let gram = problem.gram();
    let mut worst = 0.0f64;
    for i in 0..n {
        let mut gi = -1.0;
        for (j, &aj) in alphas.iter().enumerate() {
            if aj != 0.0 {
                gi += gram.entry(i, j) * aj;
            }
        }
        worst = worst.max(coordinate_violation(alphas[i], gi, problem.upper()[i]));
    }
    worst
}

/// Primal and dual objective values and their difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityGap {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

/// Evaluates both objectives at `alphas`: the dual directly from the Gram
/// entries, the primal from the recovered boundaries with hinge slacks
/// (`C_s`/`C_t`-weighted) plus the coupling penalty and both regularizers.
/// Weak duality keeps the gap nonnegative for any feasible point.
pub fn duality_gap(problem: &LiftedProblem, alphas: &[f64]) -> Result<DualityGap> {
    if alphas.len() != problem.n() {
        return Err(Error::invalid(format!(
            "expected {} dual variables, got {}",
            problem.n(),
            alphas.len()
        )));
    }
    // dual objective, straight from Q
    let mut sum = 0.0;
    let mut quad = 0.0;
    for (i, &ai) in alphas.iter().enumerate() {
        sum += ai;
        if ai == 0.0 {
            continue;
        }
        quad += ai * ai * problem.q_entry(i, i);
        for (j, &aj) in alphas.iter().enumerate().take(i) {
            if aj != 0.0 {
                quad += 2.0 * ai * aj * problem.q_entry(i, j);
            }
        }
    }
    let dual = sum - 0.5 * quad;

    // primal objective at the boundaries induced by alpha
    let boundaries = recover_boundaries(problem, alphas)?;
    let dist = boundaries.coupling_distance();
    let mut primal = 0.5 * problem.lambda() * dist * dist
        + 0.5 * boundaries.source.squared_norm()
        + 0.5 * boundaries.target.squared_norm();
    for (s, h) in problem
        .samples()
        .iter()
        .zip(hinge_losses(problem, &boundaries))
    {
        primal += s.cost * h;
    }

    Ok(DualityGap {
        primal,
        dual,
        gap: primal - dual,
    })
}

/// Per-sample slack diagnostics `max(0, 1 - y_i * f(x_i))`, each sample
/// scored by the recovered boundary of its own domain. These are the slack
/// variables of the primal, reconstructed after the fact.
pub fn hinge_losses(problem: &LiftedProblem, boundaries: &BoundaryPair) -> Vec<f64> {
    problem
        .samples()
        .iter()
        .map(|s| {
            let score = boundaries.boundary(s.domain).score(&s.features);
            (1.0 - s.sign * score).max(0.0)
        })
        .collect()
}
