//! Dense reference path for the coupled algebra.
//!
//! Everything here materializes the `2(d+1)`-dimensional block space that
//! the fast path avoids: explicit selector matrices, a dense inverse for
//! the mixing matrix, and its square root by eigendecomposition. It exists
//! to cross-check the closed-form path and is guarded to small dimensions.

use nalgebra::{DMatrix, DVector};

use crate::data::Domain;
use crate::error::{Error, Result};

use super::{BoundaryPair, LiftedProblem, LinearBoundary};

/// Largest feature dimension the dense path will materialize.
pub const MAX_DENSE_DIM: usize = 512;

fn guard(d: usize) -> Result<()> {
    if d > MAX_DENSE_DIM {
        return Err(Error::invalid(format!(
            "dense reference path supports dimension <= {MAX_DENSE_DIM}, got {d}"
        )));
    }
    Ok(())
}

/// Selector matrix extracting one `(d+1)`-block out of the concatenated
/// `2(d+1)` vector: block 0 for source, block 1 for target.
fn selector(domain: Domain, d: usize) -> DMatrix<f64> {
    let block = d + 1;
    let offset = match domain {
        Domain::Source => 0,
        Domain::Target => block,
    };
    DMatrix::from_fn(
        block,
        2 * block,
        |i, j| if j == offset + i { 1.0 } else { 0.0 },
    )
}

/// Embeds a `d`-dimensional sample into the block space with a trailing 1
/// bias coordinate in its own domain block and zeros in the other.
pub fn lift(x: &[f64], domain: Domain, d: usize) -> DVector<f64> {
    assert_eq!(x.len(), d);
    let block = d + 1;
    let offset = match domain {
        Domain::Source => 0,
        Domain::Target => block,
    };
    let mut v = DVector::zeros(2 * block);
    for (k, &xv) in x.iter().enumerate() {
        v[offset + k] = xv;
    }
    v[offset + d] = 1.0;
    v
}

/// The mixing matrix `(I + lambda * J' J)^-1` where `J` subtracts the
/// target block from the source block, computed by dense inversion.
pub fn coupling_matrix(lambda: f64, d: usize) -> Result<DMatrix<f64>> {
    guard(d)?;
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::invalid(format!(
            "coupling weight lambda must be finite and >= 0, got {lambda}"
        )));
    }
    let i_s = selector(Domain::Source, d);
    let i_t = selector(Domain::Target, d);
    let j = &i_s - &i_t;
    let size = 2 * (d + 1);
    let m = DMatrix::identity(size, size) + lambda * j.transpose() * &j;
    // LU-based inverse: nalgebra's cofactor shortcut for tiny matrices
    // loses too much precision once lambda makes this ill-conditioned
    m.lu()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("coupling system is singular".into()))
}

/// Symmetric square root by eigendecomposition. Slightly negative
/// eigenvalues from rounding are clamped to zero.
fn sqrt_spd(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = m.clone().symmetric_eigen();
    let sqrt_vals = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&v| v.max(0.0).sqrt()),
    );
    &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals) * eig.eigenvectors.transpose()
}

/// Reference Gram matrix: transforms every lifted sample by the square
/// root of the mixing matrix and takes the plain label-weighted Gram of
/// the transformed vectors.
pub fn reference_gram(problem: &LiftedProblem) -> Result<DMatrix<f64>> {
    let d = problem.dim();
    guard(d)?;
    let mix = coupling_matrix(problem.lambda(), d)?;
    let root = sqrt_spd(&mix);
    let transformed: Vec<DVector<f64>> = problem
        .samples()
        .iter()
        .map(|s| &root * lift(&s.features, s.domain, d))
        .collect();
    let n = problem.n();
    let mut q = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = problem.sample(i).sign
                * problem.sample(j).sign
                * transformed[i].dot(&transformed[j]);
            q[(i, j)] = v;
            q[(j, i)] = v;
        }
    }
    Ok(q)
}

/// Reference boundary recovery: `w = D * sum_i alpha_i y_i x_i` over lifted
/// vectors, split into the two blocks by the selector matrices.
pub fn reference_boundaries(problem: &LiftedProblem, alphas: &[f64]) -> Result<BoundaryPair> {
    let d = problem.dim();
    guard(d)?;
    if alphas.len() != problem.n() {
        return Err(Error::invalid(format!(
            "expected {} dual variables, got {}",
            problem.n(),
            alphas.len()
        )));
    }
    let mix = coupling_matrix(problem.lambda(), d)?;
    let mut v = DVector::zeros(2 * (d + 1));
    for (s, &alpha) in problem.samples().iter().zip(alphas) {
        v += alpha * s.sign * lift(&s.features, s.domain, d);
    }
    let w = mix * v;
    let extract = |domain: Domain| -> LinearBoundary {
        let block = &selector(domain, d) * &w;
        LinearBoundary {
            weights: block.iter().take(d).copied().collect(),
            bias: block[d],
        }
    };
    Ok(BoundaryPair {
        source: extract(Domain::Source),
        target: extract(Domain::Target),
    })
}
