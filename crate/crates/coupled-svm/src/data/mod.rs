//! Labeled two-domain datasets: loading, generation, standardization,
//! dimensionality reduction, and train/test splitting.

mod io;
mod pca;
mod scale;
mod split;
mod synthetic;

pub use io::{
    load_csv, load_libsvm, load_two_domains, read_feature_rows, save_libsvm, FileSpec, Format,
};
pub use pca::{apply_pca, fit_pca, PcaModel};
pub use scale::{apply_standardizer, fit_standardizer, ScalerParams};
pub use split::sample_split;
pub use synthetic::{make_shifted_gaussians, ClassSpec, SyntheticSpec};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which distribution a sample was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Source,
    Target,
}

/// One feature vector with its dense class id and domain tag.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub features: Vec<f64>,
    /// Dense class id in `[0, class_count)`.
    pub label: usize,
    pub domain: Domain,
}

impl LabeledSample {
    pub fn new(features: Vec<f64>, label: usize, domain: Domain) -> Self {
        LabeledSample {
            features,
            label,
            domain,
        }
    }
}

/// An ordered collection of samples sharing one feature dimension and one
/// label encoding.
///
/// Class labels are stored densely as `0..K-1`; `raw_labels` maps each dense
/// id back to the label value found in the original file (identity for
/// generated data).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Vec<LabeledSample>,
    dim: usize,
    raw_labels: Vec<f64>,
}

impl Dataset {
    /// Builds a dataset, validating dimension consistency, label range, and
    /// feature finiteness. `raw_labels` must be strictly increasing.
    pub fn new(samples: Vec<LabeledSample>, dim: usize, raw_labels: Vec<f64>) -> Result<Self> {
        if raw_labels.is_empty() {
            return Err(Error::invalid("dataset needs at least one class label"));
        }
        if raw_labels.iter().any(|l| !l.is_finite()) {
            return Err(Error::invalid("raw labels must be finite"));
        }
        if raw_labels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("raw labels must be strictly increasing"));
        }
        for (i, s) in samples.iter().enumerate() {
            if s.features.len() != dim {
                return Err(Error::invalid(format!(
                    "sample {} has {} features, expected {}",
                    i,
                    s.features.len(),
                    dim
                )));
            }
            if s.features.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!(
                    "sample {} contains a non-finite feature",
                    i
                )));
            }
            if s.label >= raw_labels.len() {
                return Err(Error::invalid(format!(
                    "sample {} has label {} outside [0, {})",
                    i,
                    s.label,
                    raw_labels.len()
                )));
            }
        }
        Ok(Dataset {
            samples,
            dim,
            raw_labels,
        })
    }

    /// Dataset with identity label encoding `0..class_count`.
    pub fn with_dense_labels(
        samples: Vec<LabeledSample>,
        dim: usize,
        class_count: usize,
    ) -> Result<Self> {
        Dataset::new(samples, dim, (0..class_count).map(|c| c as f64).collect())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn class_count(&self) -> usize {
        self.raw_labels.len()
    }

    pub fn samples(&self) -> &[LabeledSample] {
        &self.samples
    }

    pub fn raw_labels(&self) -> &[f64] {
        &self.raw_labels
    }

    pub fn raw_label_of(&self, dense: usize) -> f64 {
        self.raw_labels[dense]
    }

    /// Dense id of a raw label value, if known.
    pub fn dense_label_of(&self, raw: f64) -> Option<usize> {
        self.raw_labels.iter().position(|&l| l == raw)
    }

    /// `(N_s, N_t)` counts.
    pub fn domain_counts(&self) -> (usize, usize) {
        let n_s = self
            .samples
            .iter()
            .filter(|s| s.domain == Domain::Source)
            .count();
        (n_s, self.samples.len() - n_s)
    }

    pub fn n_source(&self) -> usize {
        self.domain_counts().0
    }

    pub fn n_target(&self) -> usize {
        self.domain_counts().1
    }

    /// Samples of one domain, keeping dimension and label encoding.
    pub fn domain_subset(&self, domain: Domain) -> Dataset {
        Dataset {
            samples: self
                .samples
                .iter()
                .filter(|s| s.domain == domain)
                .cloned()
                .collect(),
            dim: self.dim,
            raw_labels: self.raw_labels.clone(),
        }
    }

    /// Number of samples of class `label` in `domain`.
    pub fn class_domain_count(&self, label: usize, domain: Domain) -> usize {
        self.samples
            .iter()
            .filter(|s| s.label == label && s.domain == domain)
            .count()
    }

    /// Replaces every feature vector, keeping labels and domains. All rows
    /// must share `new_dim`. Used by feature transforms.
    pub fn map_features(&self, new_dim: usize, rows: Vec<Vec<f64>>) -> Result<Dataset> {
        if rows.len() != self.samples.len() {
            return Err(Error::invalid("feature row count mismatch"));
        }
        let samples = self
            .samples
            .iter()
            .zip(rows)
            .map(|(s, f)| LabeledSample::new(f, s.label, s.domain))
            .collect();
        Dataset::new(samples, new_dim, self.raw_labels.clone())
    }

    /// Subset by sample index, keeping metadata. Indices must be in range.
    pub(crate) fn take(&self, indices: &[usize]) -> Dataset {
        Dataset {
            samples: indices.iter().map(|&i| self.samples[i].clone()).collect(),
            dim: self.dim,
            raw_labels: self.raw_labels.clone(),
        }
    }
}
