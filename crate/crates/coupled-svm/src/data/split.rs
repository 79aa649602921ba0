//! Per-class train/test sampling for the repeated-split protocol.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::{Dataset, Domain};

/// Draws `n_source_per_class` source and `n_target_per_class` target
/// samples per class (without replacement, deterministic per seed) into the
/// training set. The test set is every remaining target sample; source
/// leftovers are dropped. Each class must keep at least one target sample
/// for testing.
pub fn sample_split(
    data: &Dataset,
    n_source_per_class: usize,
    n_target_per_class: usize,
    seed: u64,
) -> Result<(Dataset, Dataset)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train_idx: Vec<usize> = Vec::new();
    let mut test_idx: Vec<usize> = Vec::new();

    for class in 0..data.class_count() {
        let mut source: Vec<usize> = Vec::new();
        let mut target: Vec<usize> = Vec::new();
        for (i, s) in data.samples().iter().enumerate() {
            if s.label == class {
                match s.domain {
                    Domain::Source => source.push(i),
                    Domain::Target => target.push(i),
                }
            }
        }
        if source.len() < n_source_per_class {
            return Err(Error::invalid(format!(
                "class {} (raw label {}) has {} source samples, need {}",
                class,
                data.raw_label_of(class),
                source.len(),
                n_source_per_class
            )));
        }
        if target.len() < n_target_per_class + 1 {
            return Err(Error::invalid(format!(
                "class {} (raw label {}) has {} target samples, need {} plus one for testing",
                class,
                data.raw_label_of(class),
                target.len(),
                n_target_per_class
            )));
        }
        source.shuffle(&mut rng);
        target.shuffle(&mut rng);
        train_idx.extend_from_slice(&source[..n_source_per_class]);
        train_idx.extend_from_slice(&target[..n_target_per_class]);
        test_idx.extend_from_slice(&target[n_target_per_class..]);
    }

    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok((data.take(&train_idx), data.take(&test_idx)))
}
