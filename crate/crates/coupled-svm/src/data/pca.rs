//! Principal component analysis via dense symmetric eigendecomposition of
//! the feature covariance.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::Dataset;

/// Eigenvalues below `rank_tol * largest` count as numerically zero when
/// deciding the achievable rank.
const RANK_TOL: f64 = 1e-10;

/// Projection onto the top principal components of the training covariance.
/// `components` rows are orthonormal, ordered by descending eigenvalue; the
/// largest-magnitude entry of each row is positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    mean: Vec<f64>,
    components: Vec<Vec<f64>>,
}

impl PcaModel {
    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// `p x d` row-major component matrix.
    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn output_dim(&self) -> usize {
        self.components.len()
    }

    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }

    /// Projects one vector: `z = V (x - mean)`.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        self.components
            .iter()
            .map(|row| {
                row.iter()
                    .zip(x.iter().zip(&self.mean))
                    .map(|(&v, (&xi, &m))| v * (xi - m))
                    .sum()
            })
            .collect()
    }

    /// Maps a projected vector back: `x = Vᵀ z + mean`. Exact only when the
    /// model kept the full rank.
    pub fn reconstruct(&self, z: &[f64]) -> Vec<f64> {
        let mut x = self.mean.clone();
        for (row, &zi) in self.components.iter().zip(z) {
            for (xj, &vj) in x.iter_mut().zip(row) {
                *xj += vj * zi;
            }
        }
        x
    }
}

/// Fits the top-`p` principal components on `train` (the union of source
/// and target training features). Errors if `p` is out of `1..=min(d, n)`
/// or exceeds the numerical rank of the data.
pub fn fit_pca(train: &Dataset, p: usize) -> Result<PcaModel> {
    let n = train.len();
    let d = train.dim();
    if n == 0 {
        return Err(Error::invalid("cannot fit PCA on an empty dataset"));
    }
    if p == 0 || p > d.min(n) {
        return Err(Error::invalid(format!(
            "pca dimension {} out of range 1..={}",
            p,
            d.min(n)
        )));
    }

    let mut mean = vec![0.0; d];
    for s in train.samples() {
        for (m, &v) in mean.iter_mut().zip(&s.features) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }

    // covariance of centered data, population normalization
    let mut cov = DMatrix::<f64>::zeros(d, d);
    for s in train.samples() {
        let c = DVector::from_iterator(d, s.features.iter().zip(&mean).map(|(&v, &m)| v - m));
        cov.syger(1.0 / n as f64, &c, &c, 1.0);
    }
    // syger fills the lower triangle; mirror it
    for i in 0..d {
        for j in (i + 1)..d {
            cov[(i, j)] = cov[(j, i)];
        }
    }

    let eig = cov.symmetric_eigen();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());

    let largest = eig.eigenvalues[order[0]].max(0.0);
    let rank = order
        .iter()
        .filter(|&&i| eig.eigenvalues[i] > largest * RANK_TOL && eig.eigenvalues[i] > 0.0)
        .count();
    if p > rank {
        return Err(Error::invalid(format!(
            "pca dimension {p} exceeds the data rank {rank}"
        )));
    }

    let components = order[..p]
        .iter()
        .map(|&i| {
            let col = eig.eigenvectors.column(i);
            let mut row: Vec<f64> = col.iter().copied().collect();
            // sign convention: largest-magnitude entry positive
            let lead = row
                .iter()
                .enumerate()
                .max_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).unwrap())
                .map(|(i, _)| i)
                .unwrap();
            if row[lead] < 0.0 {
                for v in &mut row {
                    *v = -*v;
                }
            }
            row
        })
        .collect();

    Ok(PcaModel { mean, components })
}

/// Projects every sample of `data` onto the fitted components.
pub fn apply_pca(model: &PcaModel, data: &Dataset) -> Result<Dataset> {
    if model.input_dim() != data.dim() {
        return Err(Error::invalid(format!(
            "pca fitted on dimension {}, dataset has {}",
            model.input_dim(),
            data.dim()
        )));
    }
    let rows = data
        .samples()
        .iter()
        .map(|s| model.project(&s.features))
        .collect();
    data.map_features(model.output_dim(), rows)
}
