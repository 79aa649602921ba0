//! Per-feature standardization fitted on training data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::Dataset;

/// Features with standard deviation at or below this are treated as
/// constant and mapped to zero.
const STD_FLOOR: f64 = 1e-12;

/// Per-feature mean and standard deviation (population, floored at
/// `1e-12`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    mean: Vec<f64>,
    std: Vec<f64>,
}

impl ScalerParams {
    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn std(&self) -> &[f64] {
        &self.std
    }

    pub fn transform_vec(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(&v, (&m, &s))| if s <= STD_FLOOR { 0.0 } else { (v - m) / s })
            .collect()
    }

    /// Inverse of [`transform_vec`](Self::transform_vec). Constant features
    /// map back to their training mean.
    pub fn invert_vec(&self, z: &[f64]) -> Vec<f64> {
        z.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(&v, (&m, &s))| if s <= STD_FLOOR { m } else { v * s + m })
            .collect()
    }
}

/// Fits mean and standard deviation on `train` (typically the union of
/// source and target training data).
pub fn fit_standardizer(train: &Dataset) -> Result<ScalerParams> {
    if train.is_empty() {
        return Err(Error::invalid(
            "cannot fit standardizer on an empty dataset",
        ));
    }
    let d = train.dim();
    let n = train.len() as f64;
    let mut mean = vec![0.0; d];
    for s in train.samples() {
        for (m, &v) in mean.iter_mut().zip(&s.features) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut var = vec![0.0; d];
    for s in train.samples() {
        for ((v, &x), &m) in var.iter_mut().zip(&s.features).zip(&mean) {
            let dx = x - m;
            *v += dx * dx;
        }
    }
    let std = var.iter().map(|v| (v / n).sqrt().max(STD_FLOOR)).collect();
    Ok(ScalerParams { mean, std })
}

/// Applies training statistics to any dataset of the same dimension.
pub fn apply_standardizer(params: &ScalerParams, data: &Dataset) -> Result<Dataset> {
    if params.mean.len() != data.dim() {
        return Err(Error::invalid(format!(
            "standardizer fitted on dimension {}, dataset has {}",
            params.mean.len(),
            data.dim()
        )));
    }
    let rows = data
        .samples()
        .iter()
        .map(|s| params.transform_vec(&s.features))
        .collect();
    data.map_features(data.dim(), rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Domain, LabeledSample};

    fn dataset(rows: &[&[f64]]) -> Dataset {
        let samples = rows
            .iter()
            .map(|r| LabeledSample::new(r.to_vec(), 0, Domain::Source))
            .collect();
        Dataset::with_dense_labels(samples, rows[0].len(), 1).unwrap()
    }

    #[test]
    fn two_point_case() {
        let ds = dataset(&[&[0.0], &[2.0]]);
        let p = fit_standardizer(&ds).unwrap();
        assert_eq!(p.mean(), &[1.0]);
        assert_eq!(p.std(), &[1.0]);
        let t = apply_standardizer(&p, &ds).unwrap();
        assert_eq!(t.samples()[0].features, vec![-1.0]);
        assert_eq!(t.samples()[1].features, vec![1.0]);
    }

    #[test]
    fn constant_feature_maps_to_zero() {
        let ds = dataset(&[&[0.1, 1.0], &[0.1, 3.0], &[0.1, 5.0]]);
        let p = fit_standardizer(&ds).unwrap();
        let t = apply_standardizer(&p, &ds).unwrap();
        for s in t.samples() {
            assert_eq!(s.features[0], 0.0);
        }
    }

    #[test]
    fn fitted_statistics_hold_on_training_data() {
        let ds = dataset(&[&[1.0, -2.0], &[4.0, 0.5], &[-3.0, 2.5], &[2.0, 7.0]]);
        let p = fit_standardizer(&ds).unwrap();
        let t = apply_standardizer(&p, &ds).unwrap();
        let n = t.len() as f64;
        for j in 0..t.dim() {
            let mean: f64 = t.samples().iter().map(|s| s.features[j]).sum::<f64>() / n;
            let var: f64 = t
                .samples()
                .iter()
                .map(|s| s.features[j].powi(2))
                .sum::<f64>()
                / n;
            assert!(mean.abs() <= 1e-10, "mean {mean}");
            assert!((var.sqrt() - 1.0).abs() <= 1e-8, "std {}", var.sqrt());
        }
    }

    #[test]
    fn test_set_uses_train_statistics() {
        let train = dataset(&[&[0.0], &[2.0]]);
        let test = dataset(&[&[10.0], &[20.0]]);
        let p = fit_standardizer(&train).unwrap();
        let t = apply_standardizer(&p, &test).unwrap();
        // (10-1)/1 and (20-1)/1, not test-set statistics
        assert_eq!(t.samples()[0].features, vec![9.0]);
        assert_eq!(t.samples()[1].features, vec![19.0]);
    }

    #[test]
    fn empty_dataset_rejected() {
        let ds = Dataset::with_dense_labels(vec![], 2, 1).unwrap();
        assert!(fit_standardizer(&ds).is_err());
    }

    #[test]
    fn invert_recovers_originals() {
        let ds = dataset(&[&[1.5, 2.0], &[0.5, 2.0], &[-1.0, 2.0]]);
        let p = fit_standardizer(&ds).unwrap();
        let t = apply_standardizer(&p, &ds).unwrap();
        for (orig, tr) in ds.samples().iter().zip(t.samples()) {
            let back = p.invert_vec(&tr.features);
            for (a, b) in orig.features.iter().zip(&back) {
                assert!((a - b).abs() <= 1e-10);
            }
        }
    }
}
