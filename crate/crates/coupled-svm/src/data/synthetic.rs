//! Seeded generator for two-domain Gaussian class data where the target
//! distribution is a rigid transform of the source.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{Dataset, Domain, LabeledSample};

/// One source-domain class: a Gaussian with `mean` and optional full
/// covariance (identity when omitted).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSpec {
    pub mean: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cov: Option<Vec<Vec<f64>>>,
}

/// Generator parameters. Target class `c` draws from the source class-`c`
/// Gaussian and then applies a rotation by `rotation_deg` in the plane of
/// the first two feature axes followed by `translation`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub classes: Vec<ClassSpec>,
    #[serde(default)]
    pub rotation_deg: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translation: Option<Vec<f64>>,
    pub n_source_per_class: usize,
    pub n_target_per_class: usize,
}

impl SyntheticSpec {
    pub fn dim(&self) -> usize {
        self.classes.first().map_or(0, |c| c.mean.len())
    }

    /// Applies the configured rigid transform to one point.
    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        if out.len() >= 2 && self.rotation_deg != 0.0 {
            let theta = self.rotation_deg.to_radians();
            let (s, c) = theta.sin_cos();
            let (x0, x1) = (out[0], out[1]);
            out[0] = c * x0 - s * x1;
            out[1] = s * x0 + c * x1;
        }
        if let Some(t) = &self.translation {
            for (o, &ti) in out.iter_mut().zip(t) {
                *o += ti;
            }
        }
        out
    }

    fn validate(&self) -> Result<()> {
        if self.classes.len() < 2 {
            return Err(Error::invalid("synthetic spec needs at least 2 classes"));
        }
        let d = self.dim();
        if d == 0 {
            return Err(Error::invalid("class means must be non-empty"));
        }
        for (c, class) in self.classes.iter().enumerate() {
            if class.mean.len() != d {
                return Err(Error::invalid(format!(
                    "class {c} mean has length {}, expected {d}",
                    class.mean.len()
                )));
            }
            if let Some(cov) = &class.cov {
                if cov.len() != d || cov.iter().any(|row| row.len() != d) {
                    return Err(Error::invalid(format!(
                        "class {c} covariance must be {d}x{d}"
                    )));
                }
            }
        }
        if let Some(t) = &self.translation {
            if t.len() != d {
                return Err(Error::invalid(format!(
                    "translation has length {}, expected {d}",
                    t.len()
                )));
            }
        }
        if self.n_source_per_class == 0 && self.n_target_per_class == 0 {
            return Err(Error::invalid("per-class counts are both zero"));
        }
        Ok(())
    }
}

/// Cholesky factor used to color standard normal draws.
fn chol_factor(
    class: usize,
    d: usize,
    cov: &Option<Vec<Vec<f64>>>,
) -> Result<Option<DMatrix<f64>>> {
    let Some(cov) = cov else { return Ok(None) };
    let m = DMatrix::from_fn(d, d, |i, j| cov[i][j]);
    let chol = Cholesky::new(m).ok_or_else(|| {
        Error::Numerical(format!("class {class} covariance is not positive definite"))
    })?;
    Ok(Some(chol.l()))
}

fn draw(rng: &mut ChaCha8Rng, mean: &[f64], l: &Option<DMatrix<f64>>) -> Vec<f64> {
    let d = mean.len();
    let z: Vec<f64> = (0..d)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    match l {
        None => mean.iter().zip(&z).map(|(m, zi)| m + zi).collect(),
        Some(l) => {
            let lz = l * DVector::from_column_slice(&z);
            mean.iter().zip(lz.iter()).map(|(m, v)| m + v).collect()
        }
    }
}

/// Draws the full two-domain pool described by `spec`, deterministically
/// for a fixed `seed`. Sample order: all source classes in order, then all
/// target classes in order.
pub fn make_shifted_gaussians(spec: &SyntheticSpec, seed: u64) -> Result<Dataset> {
    spec.validate()?;
    let d = spec.dim();
    let k = spec.classes.len();
    let factors: Vec<Option<DMatrix<f64>>> = spec
        .classes
        .iter()
        .enumerate()
        .map(|(c, cl)| chol_factor(c, d, &cl.cov))
        .collect::<Result<_>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(k * (spec.n_source_per_class + spec.n_target_per_class));
    for (c, class) in spec.classes.iter().enumerate() {
        for _ in 0..spec.n_source_per_class {
            samples.push(LabeledSample::new(
                draw(&mut rng, &class.mean, &factors[c]),
                c,
                Domain::Source,
            ));
        }
    }
    for (c, class) in spec.classes.iter().enumerate() {
        for _ in 0..spec.n_target_per_class {
            let x = draw(&mut rng, &class.mean, &factors[c]);
            samples.push(LabeledSample::new(spec.transform(&x), c, Domain::Target));
        }
    }
    Dataset::with_dense_labels(samples, d, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(rotation_deg: f64, translation: Option<Vec<f64>>, n: usize) -> SyntheticSpec {
        SyntheticSpec {
            classes: vec![
                ClassSpec {
                    mean: vec![2.0, 0.0],
                    cov: None,
                },
                ClassSpec {
                    mean: vec![-2.0, 1.0],
                    cov: None,
                },
            ],
            rotation_deg,
            translation,
            n_source_per_class: n,
            n_target_per_class: n,
        }
    }

    fn class_domain_mean(ds: &Dataset, label: usize, domain: Domain) -> Vec<f64> {
        let mut mean = vec![0.0; ds.dim()];
        let mut n = 0.0;
        for s in ds.samples() {
            if s.label == label && s.domain == domain {
                for (m, &v) in mean.iter_mut().zip(&s.features) {
                    *m += v;
                }
                n += 1.0;
            }
        }
        mean.iter().map(|m| m / n).collect()
    }

    #[test]
    fn no_shift_domains_agree_in_mean() {
        let ds = make_shifted_gaussians(&spec(0.0, None, 1000), 7).unwrap();
        // unit covariance: two-sample means within 4*sigma/sqrt(n) per axis
        let bound = 4.0 / (1000f64).sqrt() * 2.0_f64.sqrt();
        for c in 0..2 {
            let ms = class_domain_mean(&ds, c, Domain::Source);
            let mt = class_domain_mean(&ds, c, Domain::Target);
            for (a, b) in ms.iter().zip(&mt) {
                assert!((a - b).abs() < bound, "class {c}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn same_seed_bit_identical() {
        let s = spec(25.0, Some(vec![0.5, -1.0]), 50);
        let a = make_shifted_gaussians(&s, 123).unwrap();
        let b = make_shifted_gaussians(&s, 123).unwrap();
        assert_eq!(a, b);
        let c = make_shifted_gaussians(&s, 124).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rotated_target_mean_matches_analytic_transform() {
        let s = spec(30.0, Some(vec![1.0, 2.0]), 1000);
        let ds = make_shifted_gaussians(&s, 99).unwrap();
        let bound = 4.0 / (1000f64).sqrt();
        for c in 0..2 {
            let expect = s.transform(&s.classes[c].mean);
            let got = class_domain_mean(&ds, c, Domain::Target);
            for (e, g) in expect.iter().zip(&got) {
                assert!((e - g).abs() < bound, "class {c}: expected {e}, got {g}");
            }
        }
    }

    #[test]
    fn non_positive_definite_covariance_rejected() {
        let mut s = spec(0.0, None, 10);
        s.classes[0].cov = Some(vec![vec![1.0, 2.0], vec![2.0, 1.0]]);
        let err = make_shifted_gaussians(&s, 0).unwrap_err();
        assert!(err.to_string().contains("positive definite"));
    }

    #[test]
    fn single_class_rejected() {
        let mut s = spec(0.0, None, 10);
        s.classes.truncate(1);
        assert!(make_shifted_gaussians(&s, 0).is_err());
    }

    #[test]
    fn full_covariance_shapes_the_cloud() {
        let mut s = spec(0.0, None, 2000);
        s.classes[0].cov = Some(vec![vec![4.0, 0.0], vec![0.0, 0.25]]);
        let ds = make_shifted_gaussians(&s, 5).unwrap();
        let mut var = [0.0f64; 2];
        let mean = class_domain_mean(&ds, 0, Domain::Source);
        let mut n = 0.0;
        for smp in ds.samples() {
            if smp.label == 0 && smp.domain == Domain::Source {
                var[0] += (smp.features[0] - mean[0]).powi(2);
                var[1] += (smp.features[1] - mean[1]).powi(2);
                n += 1.0;
            }
        }
        assert!((var[0] / n - 4.0).abs() < 0.5);
        assert!((var[1] / n - 0.25).abs() < 0.1);
    }
}
