//! Algebra of the coupled formulation.
//!
//! Training couples a source and a target linear SVM through a penalty
//! `lambda * ||w_s - w_t||^2 / 2`. After lifting every sample into a block
//! vector that is zero in the other domain's block (with a constant-1 bias
//! coordinate), the joint problem reduces to a single SVM dual whose
//! effective inner product is `s * (<x_i, x_j> + 1)` with
//! `s = (1 + lambda) / (1 + 2 lambda)` for same-domain pairs and
//! `s = lambda / (1 + 2 lambda)` for cross-domain pairs. The fast path
//! works entirely with those two scalars; [`dense`] materializes the block
//! matrices and serves as the reference implementation for tests.

pub mod dense;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::data::Domain;
use crate::error::{Error, Result};

/// The two distinct entries of the block matrix that mixes the domains:
/// `same` on the diagonal blocks, `cross` off-diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingCoefficients {
    lambda: f64,
    same: f64,
    cross: f64,
}

impl CouplingCoefficients {
    /// Coefficients for a coupling weight `lambda >= 0`:
    /// `same = (1 + lambda) / (1 + 2 lambda)`, `cross = lambda / (1 + 2 lambda)`.
    pub fn new(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::invalid(format!(
                "coupling weight lambda must be finite and >= 0, got {lambda}"
            )));
        }
        let denom = 1.0 + 2.0 * lambda;
        let coeff = CouplingCoefficients {
            lambda,
            same: (1.0 + lambda) / denom,
            cross: lambda / denom,
        };
        debug_assert!((coeff.same + coeff.cross - 1.0).abs() <= 1e-12);
        debug_assert!((coeff.same - coeff.cross - 1.0 / denom).abs() <= 1e-12);
        Ok(coeff)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Weight applied when both samples come from the same domain.
    pub fn same_domain(&self) -> f64 {
        self.same
    }

    /// Weight applied across domains.
    pub fn cross_domain(&self) -> f64 {
        self.cross
    }

    fn weight(&self, a: Domain, b: Domain) -> f64 {
        if a == b {
            self.same
        } else {
            self.cross
        }
    }
}

/// One training sample of the joint problem.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedSample {
    pub features: Vec<f64>,
    /// Binary label, +1 or -1.
    pub sign: f64,
    /// Box bound for this sample's dual variable: `c_source` or `c_target`
    /// by domain.
    pub cost: f64,
    pub domain: Domain,
}

/// The joint two-domain training problem. Conceptually each sample lives in
/// a `2(d+1)`-dimensional block space; that embedding is never materialized
/// here.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedProblem {
    samples: Vec<LiftedSample>,
    dim: usize,
    coeff: CouplingCoefficients,
    c_source: f64,
    c_target: f64,
}

impl LiftedProblem {
    /// Assembles the problem; per-sample costs follow the domain tag.
    pub fn new(
        samples: Vec<(Vec<f64>, f64, Domain)>,
        lambda: f64,
        c_source: f64,
        c_target: f64,
    ) -> Result<Self> {
        let coeff = CouplingCoefficients::new(lambda)?;
        if samples.is_empty() {
            return Err(Error::invalid("lifted problem needs at least one sample"));
        }
        if !(c_source.is_finite() && c_source > 0.0 && c_target.is_finite() && c_target > 0.0) {
            return Err(Error::invalid(format!(
                "costs must be finite and positive, got c_source={c_source}, c_target={c_target}"
            )));
        }
        let dim = samples[0].0.len();
        let samples = samples
            .into_iter()
            .enumerate()
            .map(|(i, (features, sign, domain))| {
                if features.len() != dim {
                    return Err(Error::invalid(format!(
                        "sample {i} has dimension {}, expected {dim}",
                        features.len()
                    )));
                }
                if features.iter().any(|v| !v.is_finite()) {
                    return Err(Error::invalid(format!(
                        "sample {i} has a non-finite feature"
                    )));
                }
                if sign != 1.0 && sign != -1.0 {
                    return Err(Error::invalid(format!(
                        "sample {i} has label {sign}, expected +1 or -1"
                    )));
                }
                let cost = match domain {
                    Domain::Source => c_source,
                    Domain::Target => c_target,
                };
                Ok(LiftedSample {
                    features,
                    sign,
                    cost,
                    domain,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LiftedProblem {
            samples,
            dim,
            coeff,
            c_source,
            c_target,
        })
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lambda(&self) -> f64 {
        self.coeff.lambda
    }

    pub fn coefficients(&self) -> &CouplingCoefficients {
        &self.coeff
    }

    pub fn samples(&self) -> &[LiftedSample] {
        &self.samples
    }

    pub fn sample(&self, i: usize) -> &LiftedSample {
        &self.samples[i]
    }

    pub fn c_source(&self) -> f64 {
        self.c_source
    }

    pub fn c_target(&self) -> f64 {
        self.c_target
    }

    /// Per-sample dual upper bounds.
    pub fn upper_bounds(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.cost).collect()
    }

    /// `(N_s, N_t)`.
    pub fn domain_counts(&self) -> (usize, usize) {
        let n_s = self
            .samples
            .iter()
            .filter(|s| s.domain == Domain::Source)
            .count();
        (n_s, self.samples.len() - n_s)
    }

    /// Gram entry `Q_ij = y_i y_j * k(x_i, x_j)` with the coupled inner
    /// product as kernel.
    pub fn q_entry(&self, i: usize, j: usize) -> f64 {
        let a = &self.samples[i];
        let b = &self.samples[j];
        a.sign
            * b.sign
            * coupled_inner_product(&a.features, &b.features, a.domain, b.domain, &self.coeff)
    }
}

/// The effective kernel of the reduced problem:
/// `weight * (<x_i, x_j> + 1)` where the `+1` accounts for the bias
/// coordinate and `weight` is `same_domain` or `cross_domain`.
///
/// Panics if the vectors have different lengths.
pub fn coupled_inner_product(
    x_i: &[f64],
    x_j: &[f64],
    dom_i: Domain,
    dom_j: Domain,
    coeff: &CouplingCoefficients,
) -> f64 {
    assert_eq!(
        x_i.len(),
        x_j.len(),
        "coupled inner product length mismatch"
    );
    let dot: f64 = x_i.iter().zip(x_j).map(|(a, b)| a * b).sum();
    coeff.weight(dom_i, dom_j) * (dot + 1.0)
}

/// Full dense Gram matrix `Q` of the reduced dual. Symmetric positive
/// semidefinite by construction.
pub fn build_gram(problem: &LiftedProblem) -> DMatrix<f64> {
    let n = problem.n();
    let mut q = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = problem.q_entry(i, j);
            q[(i, j)] = v;
            q[(j, i)] = v;
        }
    }
    q
}

/// A linear decision function `score(x) = weights . x + bias`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearBoundary {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearBoundary {
    pub fn zeros(dim: usize) -> Self {
        LinearBoundary {
            weights: vec![0.0; dim],
            bias: 0.0,
        }
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.weights.len());
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }

    /// Squared norm of the augmented vector `[weights, bias]`.
    pub fn squared_norm(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum::<f64>() + self.bias * self.bias
    }
}

/// The recovered source and target boundaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPair {
    pub source: LinearBoundary,
    pub target: LinearBoundary,
}

impl BoundaryPair {
    pub fn dim(&self) -> usize {
        self.source.weights.len()
    }

    pub fn boundary(&self, domain: Domain) -> &LinearBoundary {
        match domain {
            Domain::Source => &self.source,
            Domain::Target => &self.target,
        }
    }

    /// `||w_s - w_t||` over the augmented vectors (bias included), the
    /// quantity the coupling penalty acts on.
    pub fn coupling_distance(&self) -> f64 {
        let mut sq = (self.source.bias - self.target.bias).powi(2);
        for (a, b) in self.source.weights.iter().zip(&self.target.weights) {
            sq += (a - b) * (a - b);
        }
        sq.sqrt()
    }
}

/// Maps dual variables back to the two boundaries. With
/// `v_dom = sum_{i in dom} alpha_i y_i [x_i; 1]`:
/// source boundary `= same * v_s + cross * v_t`, target boundary
/// `= cross * v_s + same * v_t`.
pub fn recover_boundaries(problem: &LiftedProblem, alphas: &[f64]) -> Result<BoundaryPair> {
    if alphas.len() != problem.n() {
        return Err(Error::invalid(format!(
            "expected {} dual variables, got {}",
            problem.n(),
            alphas.len()
        )));
    }
    if alphas.iter().any(|a| !a.is_finite()) {
        return Err(Error::invalid("dual variables must be finite"));
    }
    let d = problem.dim();
    let mut v_s = vec![0.0; d + 1];
    let mut v_t = vec![0.0; d + 1];
    for (s, &alpha) in problem.samples().iter().zip(alphas) {
        if alpha == 0.0 {
            continue;
        }
        let v = match s.domain {
            Domain::Source => &mut v_s,
            Domain::Target => &mut v_t,
        };
        let ay = alpha * s.sign;
        for (vk, &xk) in v.iter_mut().zip(&s.features) {
            *vk += ay * xk;
        }
        v[d] += ay; // bias coordinate
    }
    let a = problem.coeff.same;
    let b = problem.coeff.cross;
    let mix = |p: &[f64], q: &[f64], ca: f64, cb: f64| -> LinearBoundary {
        let full: Vec<f64> = p.iter().zip(q).map(|(&x, &y)| ca * x + cb * y).collect();
        LinearBoundary {
            bias: full[d],
            weights: full[..d].to_vec(),
        }
    };
    Ok(BoundaryPair {
        source: mix(&v_s, &v_t, a, b),
        target: mix(&v_s, &v_t, b, a),
    })
}
