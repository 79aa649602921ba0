//! Shared helpers for unit tests, including an independent Jacobi
//! eigenvalue routine used as an oracle against the production
//! decomposition paths.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coupling::LiftedProblem;
use crate::data::Domain;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random coupled instance with both domains and both labels present.
pub fn random_lifted_problem(
    seed: u64,
    n: usize,
    d: usize,
    lambda: f64,
    c_source: f64,
    c_target: f64,
) -> LiftedProblem {
    let mut rng = seeded_rng(seed);
    let samples: Vec<(Vec<f64>, f64, Domain)> = (0..n)
        .map(|i| {
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
            // force a mix of labels and domains on the first four samples
            let y = match i {
                0 | 2 => 1.0,
                1 | 3 => -1.0,
                _ => {
                    if rng.random_bool(0.5) {
                        1.0
                    } else {
                        -1.0
                    }
                }
            };
            let dom = match i {
                0 | 1 => Domain::Source,
                2 | 3 => Domain::Target,
                _ => {
                    if rng.random_bool(0.5) {
                        Domain::Source
                    } else {
                        Domain::Target
                    }
                }
            };
            (x, y, dom)
        })
        .collect();
    LiftedProblem::new(samples, lambda, c_source, c_target).unwrap()
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
/// Deliberately not the decomposition used in production code.
#[allow(clippy::needless_range_loop)]
pub fn jacobi_eigenvalues(matrix: &[Vec<f64>]) -> Vec<f64> {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_on_known_matrix() {
        // eigenvalues of [[2,1],[1,2]] are 1 and 3
        let m = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        let mut e = jacobi_eigenvalues(&m);
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((e[0] - 1.0).abs() < 1e-12);
        assert!((e[1] - 3.0).abs() < 1e-12);
    }
}
