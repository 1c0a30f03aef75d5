use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{MultiViewDataset, View};
use crate::error::{Error, Result};

/// Shape of a synthetic multi-view dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthSpec {
    pub num_classes: usize,
    pub per_class: usize,
    /// Feature count of each view.
    pub dims: Vec<usize>,
    pub latent_dim: usize,
    /// Distance between neighbouring class centres, in latent standard deviations.
    pub separation: f64,
    /// Standard deviation of the per-view additive noise.
    pub noise: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(num_views: usize, num_classes: usize, per_class: usize, dim: usize, seed: u64) -> Self {
        Self {
            num_classes,
            per_class,
            dims: vec![dim; num_views],
            latent_dim: 3,
            separation: 8.0,
            noise: 0.1,
            seed,
        }
    }
}

/// Class-conditional unit Gaussian blobs in a latent space, mapped into each
/// view by a seeded random linear map with additive Gaussian noise. Rows are
/// grouped by class.
pub fn synthesize_dataset(spec: &SynthSpec) -> Result<MultiViewDataset> {
    if spec.num_classes == 0 || spec.per_class == 0 || spec.latent_dim == 0 || spec.dims.is_empty() {
        return Err(Error::InvalidConfig("synthetic sizes must be positive".into()));
    }
    if spec.dims.contains(&0) {
        return Err(Error::InvalidConfig("view dimensions must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut normal = move || -> f64 { rng.sample(StandardNormal) };

    // Centres sit along a random unit direction, `separation` apart.
    let mut dir: Vec<f64> = (0..spec.latent_dim).map(|_| normal()).collect();
    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    dir.iter_mut().for_each(|v| *v /= norm);

    let n = spec.num_classes * spec.per_class;
    let mut latent = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for c in 0..spec.num_classes {
        for _ in 0..spec.per_class {
            let z: Vec<f64> = dir
                .iter()
                .map(|d| d * spec.separation * c as f64 + normal())
                .collect();
            latent.push(z);
            labels.push(c as i64);
        }
    }

    let mut views = Vec::with_capacity(spec.dims.len());
    for (m, &d) in spec.dims.iter().enumerate() {
        let map: Vec<Vec<f64>> = (0..d)
            .map(|_| (0..spec.latent_dim).map(|_| normal() / (d as f64).sqrt()).collect())
            .collect();
        let rows = latent
            .iter()
            .map(|z| {
                map.iter()
                    .map(|w| w.iter().zip(z).map(|(a, b)| a * b).sum::<f64>() + spec.noise * normal())
                    .collect()
            })
            .collect();
        views.push(View::new(format!("V{}", m + 1), rows)?);
    }
    MultiViewDataset::new(views, labels, spec.num_classes, format!("synthetic seed={}", spec.seed))
}
