//! Synthetic multiband phantoms: Gaussian pixel clusters with a recorded
//! ground truth and a controlled additive noise level, standing in for
//! external multispectral volumes in desk-scale experiments.

use anyhow::{bail, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Deserialize;

use dialectic::seed::derive_seed;
use dialectic::{Image64, LabelMap};

const NOISE_TAG: u64 = 0x6e6f6973; // "nois"

#[derive(Debug, Clone, Deserialize)]
pub struct ClusterSpec {
    /// Cluster mean in `[0,1]^bands`.
    pub mean: Vec<f64>,
    /// Per-band standard deviation.
    pub std: Vec<f64>,
    /// Fraction of the pixels drawn from this cluster.
    pub fraction: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct PhantomSpec {
    pub height: usize,
    pub width: usize,
    pub bands: usize,
    pub clusters: Vec<ClusterSpec>,
    /// Additive zero-mean Gaussian noise with per-band std `percent/100`.
    #[serde(default)]
    pub noise_percent: f64,
}

impl PhantomSpec {
    pub fn validate(&self) -> Result<()> {
        if self.height == 0 || self.width == 0 || self.bands == 0 {
            bail!("phantom dimensions must be positive");
        }
        if self.clusters.is_empty() {
            bail!("a phantom needs at least one cluster");
        }
        let total: f64 = self.clusters.iter().map(|c| c.fraction).sum();
        if (total - 1.0).abs() > 1e-9 {
            bail!("cluster fractions must sum to 1 (got {total})");
        }
        for (i, c) in self.clusters.iter().enumerate() {
            if c.mean.len() != self.bands || c.std.len() != self.bands {
                bail!("cluster {i}: mean/std must have {} components", self.bands);
            }
            if c.fraction < 0.0 {
                bail!("cluster {i}: negative fraction");
            }
            if c.mean.iter().any(|&m| !(0.0..=1.0).contains(&m)) {
                bail!("cluster {i}: means must lie in [0,1]");
            }
            if c.std.iter().any(|&s| s < 0.0) {
                bail!("cluster {i}: negative std");
            }
        }
        if self.noise_percent < 0.0 {
            bail!("noise percent must be nonnegative");
        }
        Ok(())
    }
}

/// Largest-remainder split of `n` pixels over the cluster fractions.
fn cluster_counts(spec: &PhantomSpec, n: usize) -> Vec<usize> {
    let mut counts: Vec<usize> = spec
        .clusters
        .iter()
        .map(|c| (c.fraction * n as f64).floor() as usize)
        .collect();
    let assigned: usize = counts.iter().sum();
    let mut remainders: Vec<(usize, f64)> = spec
        .clusters
        .iter()
        .enumerate()
        .map(|(i, c)| (i, c.fraction * n as f64 - counts[i] as f64))
        .collect();
    remainders.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    for k in 0..n - assigned {
        counts[remainders[k % remainders.len()].0] += 1;
    }
    counts
}

/// Draws the phantom. The cluster layout and cluster-conditional values
/// come from the base seed; the additive noise uses a derived stream, so
/// two noise levels under one seed share identical labels and differ only
/// in the perturbation.
pub fn generate_phantom(spec: &PhantomSpec, seed: u64) -> Result<(Image64, LabelMap)> {
    spec.validate()?;
    let n = spec.height * spec.width;
    let counts = cluster_counts(spec, n);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<usize> = counts
        .iter()
        .enumerate()
        .flat_map(|(c, &k)| std::iter::repeat_n(c, k))
        .collect();
    rand::seq::SliceRandom::shuffle(labels.as_mut_slice(), &mut rng);

    let mut data = Vec::with_capacity(n * spec.bands);
    for &label in &labels {
        let cluster = &spec.clusters[label];
        for j in 0..spec.bands {
            let g: f64 = StandardNormal.sample(&mut rng);
            data.push((cluster.mean[j] + cluster.std[j] * g).clamp(0.0, 1.0));
        }
    }

    if spec.noise_percent > 0.0 {
        let sigma = spec.noise_percent / 100.0;
        let mut noise_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, NOISE_TAG, 0));
        for v in data.iter_mut() {
            let g: f64 = StandardNormal.sample(&mut noise_rng);
            *v = (*v + sigma * g).clamp(0.0, 1.0);
        }
    }

    let image = Image64::new(spec.height, spec.width, spec.bands, data)?;
    let truth = LabelMap::new(spec.height, spec.width, labels)?;
    Ok((image, truth))
}

/// Adds seeded Gaussian noise to an existing image (file-input sweeps).
pub fn add_noise(image: &Image64, percent: f64, seed: u64) -> Result<Image64> {
    if percent < 0.0 {
        bail!("noise percent must be nonnegative");
    }
    if percent == 0.0 {
        return Ok(image.clone());
    }
    let sigma = percent / 100.0;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, NOISE_TAG, 1));
    let data: Vec<f64> = image
        .as_slice()
        .iter()
        .map(|&v| {
            let g: f64 = StandardNormal.sample(&mut rng);
            (v + sigma * g).clamp(0.0, 1.0)
        })
        .collect();
    Ok(Image64::new(image.height(), image.width(), image.bands(), data)?)
}

/// A convenient n-cluster test spec with equal fractions and shared std.
pub fn equal_cluster_spec(
    height: usize,
    width: usize,
    means: &[Vec<f64>],
    std: f64,
    noise_percent: f64,
) -> PhantomSpec {
    let k = means.len();
    let bands = means[0].len();
    PhantomSpec {
        height,
        width,
        bands,
        clusters: means
            .iter()
            .map(|m| ClusterSpec {
                mean: m.clone(),
                std: vec![std; bands],
                fraction: 1.0 / k as f64,
            })
            .collect(),
        noise_percent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_cluster_spec(noise: f64) -> PhantomSpec {
        equal_cluster_spec(
            32,
            32,
            &[vec![0.1], vec![0.5], vec![0.9]],
            0.02,
            noise,
        )
    }

    #[test]
    fn zero_spread_yields_piecewise_constant_image() {
        let mut spec = three_cluster_spec(0.0);
        for c in spec.clusters.iter_mut() {
            c.std = vec![0.0];
        }
        let (img, truth) = generate_phantom(&spec, 5).unwrap();
        for (u, &label) in truth.labels().iter().enumerate() {
            assert_eq!(img.pixel(u)[0], spec.clusters[label].mean[0]);
        }
    }

    #[test]
    fn noise_level_preserves_labels_and_changes_pixels() {
        let clean = three_cluster_spec(0.0);
        let noisy = three_cluster_spec(9.0);
        let (img0, t0) = generate_phantom(&clean, 7).unwrap();
        let (img9, t9) = generate_phantom(&noisy, 7).unwrap();
        assert_eq!(t0.labels(), t9.labels());
        assert_ne!(img0.as_slice(), img9.as_slice());
    }

    #[test]
    fn empirical_cluster_means_match_spec() {
        let spec = three_cluster_spec(0.0);
        let (img, truth) = generate_phantom(&spec, 11).unwrap();
        for (c, cluster) in spec.clusters.iter().enumerate() {
            let mut sum = 0.0;
            let mut count = 0usize;
            for (u, &label) in truth.labels().iter().enumerate() {
                if label == c {
                    sum += img.pixel(u)[0];
                    count += 1;
                }
            }
            let mean = sum / count as f64;
            assert!(
                (mean - cluster.mean[0]).abs() < 0.01,
                "cluster {c}: {mean} vs {}",
                cluster.mean[0]
            );
        }
    }

    #[test]
    fn fractions_must_sum_to_one() {
        let mut spec = three_cluster_spec(0.0);
        spec.clusters[0].fraction = 0.9;
        assert!(generate_phantom(&spec, 1).is_err());
    }

    #[test]
    fn counts_are_exact_under_largest_remainder() {
        let spec = PhantomSpec {
            height: 10,
            width: 10,
            bands: 1,
            clusters: vec![
                ClusterSpec { mean: vec![0.1], std: vec![0.0], fraction: 1.0 / 3.0 },
                ClusterSpec { mean: vec![0.5], std: vec![0.0], fraction: 1.0 / 3.0 },
                ClusterSpec { mean: vec![0.9], std: vec![0.0], fraction: 1.0 / 3.0 },
            ],
            noise_percent: 0.0,
        };
        let counts = cluster_counts(&spec, 100);
        assert_eq!(counts.iter().sum::<usize>(), 100);
        assert!(counts.iter().all(|&c| c == 33 || c == 34));
    }
}
