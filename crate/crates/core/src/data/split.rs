use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-class train and test counts and the shuffle seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_per_class: usize,
    pub test_per_class: usize,
    pub seed: u64,
}

/// Digits 0–4 become −1 and 5–9 become +1.
pub fn binarize_labels(digits: &[i64]) -> Result<Vec<i8>> {
    digits
        .iter()
        .map(|&d| match d {
            0..=4 => Ok(-1),
            5..=9 => Ok(1),
            _ => Err(Error::DigitOutOfRange(d.clamp(0, 255) as u8)),
        })
        .collect()
}

/// Shuffles each class with a seeded generator and takes the first
/// `train_per_class` indices for training and the next `test_per_class`
/// for testing. Classes are processed in order −1, +1; index lists are
/// returned sorted.
pub fn balanced_split(labels: &[i8], spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    if spec.train_per_class == 0 || spec.test_per_class == 0 {
        return Err(Error::InvalidConfig("split sizes must be at least 1".into()));
    }
    if let Some(&bad) = labels.iter().find(|&&l| l != 1 && l != -1) {
        return Err(Error::InvalidLabel(bad as i64));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let need = spec.train_per_class + spec.test_per_class;
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in [-1i8, 1] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if idx.len() < need {
            return Err(Error::InsufficientInstances {
                class,
                requested: need,
                available: idx.len(),
            });
        }
        idx.shuffle(&mut rng);
        train.extend_from_slice(&idx[..spec.train_per_class]);
        test.extend_from_slice(&idx[spec.train_per_class..need]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binarize_boundaries() {
        assert_eq!(binarize_labels(&[0, 4, 5, 9]).unwrap(), vec![-1, -1, 1, 1]);
        assert!(matches!(binarize_labels(&[10]), Err(Error::DigitOutOfRange(10))));
        assert!(binarize_labels(&[-1]).is_err());
    }

    #[test]
    fn tiny_split_uses_everything() {
        let labels = [1, -1, 1, -1];
        let spec = SplitSpec { train_per_class: 1, test_per_class: 1, seed: 3 };
        let (tr, te) = balanced_split(&labels, &spec).unwrap();
        let mut all: Vec<usize> = tr.iter().chain(&te).copied().collect();
        all.sort_unstable();
        assert_eq!(all, vec![0, 1, 2, 3]);
        assert_eq!(balanced_split(&labels, &spec).unwrap(), (tr, te));
    }

    #[test]
    fn insufficient() {
        let spec = SplitSpec { train_per_class: 2, test_per_class: 1, seed: 0 };
        assert!(matches!(
            balanced_split(&[1, 1, -1, -1, 1], &spec),
            Err(Error::InsufficientInstances { class: -1, requested: 3, available: 2 })
        ));
    }
}
