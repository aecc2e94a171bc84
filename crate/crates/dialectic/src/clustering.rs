//! Baseline unsupervised quantizers: online k-means, x-means model
//! selection, fuzzy c-means and a 1-D ring Kohonen map. All of them train a
//! [`Codebook`] over the pixels of a [`MultibandImage`].

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::image::MultibandImage;
use crate::metrics::{equal_omran_weights, fcm_memberships, omran_index, quantization_error};
use crate::real::{distance, distance_sq, Real};
use crate::seed::derive_seed;
use crate::vq::{classify, Codebook};

/// SOM neighborhood shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Neighborhood {
    Gaussian,
    Rectangular,
}

/// Shared training parameters for the baseline quantizers.
#[derive(Debug, Clone)]
pub struct TrainConfig<T> {
    pub class_count: usize,
    /// Epoch budget k_max; the learning rate decays linearly to 0 across it.
    pub max_iterations: usize,
    pub initial_rate: T,
    /// Fuzziness q > 1 (fuzzy c-means and the XB index).
    pub fuzziness: T,
    /// SOM neighborhood shape.
    pub neighborhood: Neighborhood,
    /// SOM initial radius; defaults to `class_count / 4` when unset.
    pub initial_radius: Option<T>,
    pub rng_seed: u64,
}

impl<T: Real> TrainConfig<T> {
    pub fn new(class_count: usize, rng_seed: u64) -> Self {
        Self {
            class_count,
            max_iterations: 200,
            initial_rate: T::from_f64(0.1).unwrap(),
            fuzziness: T::from_f64(2.0).unwrap(),
            neighborhood: Neighborhood::Gaussian,
            initial_radius: None,
            rng_seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.class_count == 0 {
            return Err(Error::InvalidConfig("class count must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig(
                "iteration budget must be positive".into(),
            ));
        }
        if !(self.initial_rate > T::zero() && self.initial_rate < T::one()) {
            return Err(Error::InvalidConfig(
                "initial rate must be in (0,1)".into(),
            ));
        }
        Ok(())
    }
}

/// Lexicographically sorted list of distinct pixel values.
fn distinct_pixels<T: Real>(image: &MultibandImage<T>) -> Vec<Vec<T>> {
    let mut pixels: Vec<Vec<T>> = image.pixels().map(|p| p.to_vec()).collect();
    pixels.sort_by(|a, b| a.partial_cmp(b).expect("pixels are finite"));
    pixels.dedup();
    pixels
}

/// Uniform sample (without replacement) of `count` distinct pixel values.
pub(crate) fn sample_initial_centroids<T: Real, R: Rng + ?Sized>(
    image: &MultibandImage<T>,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Vec<T>>> {
    let pool = distinct_pixels(image);
    if pool.len() < count {
        return Err(Error::InvalidConfig(format!(
            "requested {} classes but the image has only {} distinct pixel values",
            count,
            pool.len()
        )));
    }
    let picks = rand::seq::index::sample(rng, pool.len(), count);
    Ok(picks.into_iter().map(|i| pool[i].clone()).collect())
}

fn shuffled_indices<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order
}

fn nearest<T: Real>(x: &[T], centroids: &[Vec<T>]) -> usize {
    let mut best = 0;
    let mut best_d = distance_sq(x, &centroids[0]);
    for (k, c) in centroids.iter().enumerate().skip(1) {
        let d = distance_sq(x, c);
        if d < best_d {
            best = k;
            best_d = d;
        }
    }
    best
}

/// Linear decay from `eta0` at epoch 0 toward 0 after `total` epochs.
fn linear_rate<T: Real>(eta0: T, epoch: usize, total: usize) -> T {
    eta0 * (T::one() - T::from_count(epoch) / T::from_count(total))
}

fn kmeans_train_impl<T: Real>(
    image: &MultibandImage<T>,
    config: &TrainConfig<T>,
    mut on_epoch: impl FnMut(&[Vec<T>], T),
) -> Result<Codebook<T>> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut centroids = sample_initial_centroids(image, config.class_count, &mut rng)?;
    for epoch in 0..config.max_iterations {
        let eta = linear_rate(config.initial_rate, epoch, config.max_iterations);
        for u in shuffled_indices(image.pixel_count(), &mut rng) {
            let x = image.pixel(u);
            let k = nearest(x, &centroids);
            for (w, &xj) in centroids[k].iter_mut().zip(x) {
                *w = *w + eta * (xj - *w);
            }
        }
        on_epoch(&centroids, eta);
    }
    Codebook::new(centroids)
}

/// Online (sample-at-a-time) k-means: per presented pixel the nearest
/// centroid moves by `eta(t) (x - v)`, with pixels reshuffled each epoch
/// under the run seed.
pub fn kmeans_train<T: Real>(
    image: &MultibandImage<T>,
    config: &TrainConfig<T>,
) -> Result<Codebook<T>> {
    kmeans_train_impl(image, config, |_, _| {})
}

/// A fixed number of deterministic Lloyd (batch) iterations from the given
/// centroids. Empty clusters are re-seeded at the pixel currently farthest
/// from its assigned centroid.
pub fn lloyd_iterations<T: Real>(
    image: &MultibandImage<T>,
    mut centroids: Vec<Vec<T>>,
    iterations: usize,
) -> Vec<Vec<T>> {
    let bands = image.bands();
    for _ in 0..iterations {
        let mut sums = vec![vec![T::zero(); bands]; centroids.len()];
        let mut counts = vec![0usize; centroids.len()];
        let mut labels = Vec::with_capacity(image.pixel_count());
        for px in image.pixels() {
            let k = nearest(px, &centroids);
            labels.push(k);
            counts[k] += 1;
            for (s, &v) in sums[k].iter_mut().zip(px) {
                *s = *s + v;
            }
        }
        let mut claimed: Vec<usize> = Vec::new();
        for k in 0..centroids.len() {
            if counts[k] > 0 {
                let n = T::from_count(counts[k]);
                for (w, &s) in centroids[k].iter_mut().zip(&sums[k]) {
                    *w = s / n;
                }
            } else {
                // farthest-pixel repair, one pixel per empty cluster
                let mut far_u = 0;
                let mut far_d = T::neg_infinity();
                for (u, px) in image.pixels().enumerate() {
                    if claimed.contains(&u) {
                        continue;
                    }
                    let d = distance_sq(px, &centroids[labels[u]]);
                    if d > far_d {
                        far_d = d;
                        far_u = u;
                    }
                }
                claimed.push(far_u);
                centroids[k] = image.pixel(far_u).to_vec();
            }
        }
    }
    centroids
}

/// Which index scores a class count in the x-means sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XMeansScore {
    OmranIndex,
    QuantizationError,
}

#[derive(Debug, Clone)]
pub struct XMeansConfig<T> {
    pub min_classes: usize,
    pub max_classes: usize,
    pub inner: TrainConfig<T>,
    pub score: XMeansScore,
    /// Independent k-means runs per class count; the best-scoring run is
    /// kept. 1 reproduces a plain sweep.
    pub restarts: usize,
}

impl<T: Real> XMeansConfig<T> {
    pub fn new(min_classes: usize, max_classes: usize, inner: TrainConfig<T>) -> Self {
        Self {
            min_classes,
            max_classes,
            inner,
            score: XMeansScore::OmranIndex,
            restarts: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct XMeansOutcome<T> {
    pub best_classes: usize,
    pub codebook: Codebook<T>,
    /// One `(class count, best score)` row per swept value.
    pub scores: Vec<(usize, T)>,
}

/// Sweeps the class count, training k-means at each value and scoring it
/// with the configured index; returns the count with the lowest score,
/// ties resolved toward the smaller count.
pub fn xmeans_select<T: Real>(
    image: &MultibandImage<T>,
    config: &XMeansConfig<T>,
) -> Result<XMeansOutcome<T>> {
    if config.min_classes == 0 || config.min_classes > config.max_classes {
        return Err(Error::InvalidConfig(
            "x-means needs 1 <= min_classes <= max_classes".into(),
        ));
    }
    if config.restarts == 0 {
        return Err(Error::InvalidConfig("restarts must be positive".into()));
    }
    let mut scores = Vec::new();
    let mut best: Option<(usize, T, Codebook<T>)> = None;
    for n_g in config.min_classes..=config.max_classes {
        let mut row: Option<(T, Codebook<T>)> = None;
        for restart in 0..config.restarts {
            let mut cfg = config.inner.clone();
            cfg.class_count = n_g;
            cfg.rng_seed = derive_seed(config.inner.rng_seed, n_g as u64, restart as u64);
            let codebook = kmeans_train(image, &cfg)?;
            let labels = classify(image, &codebook)?;
            let score = match config.score {
                XMeansScore::OmranIndex => {
                    omran_index(image, &codebook, &labels, equal_omran_weights(), T::one())?
                }
                XMeansScore::QuantizationError => {
                    quantization_error(image, &codebook, &labels)?.0
                }
            };
            if row.as_ref().is_none_or(|(s, _)| score < *s) {
                row = Some((score, codebook));
            }
        }
        let (score, codebook) = row.expect("at least one restart");
        scores.push((n_g, score));
        if best.as_ref().is_none_or(|(_, s, _)| score < *s) {
            best = Some((n_g, score, codebook));
        }
    }
    let (best_classes, _, codebook) = best.expect("non-empty sweep");
    Ok(XMeansOutcome {
        best_classes,
        codebook,
        scores,
    })
}

/// A trained fuzzy c-means model: the codebook plus its membership function.
#[derive(Debug, Clone)]
pub struct FcmModel<T> {
    pub codebook: Codebook<T>,
    pub fuzziness: T,
    /// Alternating-update iterations actually run before convergence.
    pub iterations: usize,
}

impl<T: Real> FcmModel<T> {
    /// Membership vector of one sample over the model's classes.
    pub fn memberships(&self, x: &[T]) -> Vec<T> {
        let mut mu = vec![T::zero(); self.codebook.len()];
        fcm_memberships(x, self.codebook.centroids(), self.fuzziness, &mut mu);
        mu
    }
}

/// Batch fuzzy c-means: alternates membership and centroid updates until
/// the iteration budget or a centroid movement below 1e-6.
pub fn fcm_train<T: Real>(
    image: &MultibandImage<T>,
    config: &TrainConfig<T>,
) -> Result<FcmModel<T>> {
    config.validate()?;
    if !(config.fuzziness > T::one()) {
        return Err(Error::InvalidConfig("fuzziness must exceed 1".into()));
    }
    let q = config.fuzziness;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut centroids = sample_initial_centroids(image, config.class_count, &mut rng)?;
    let bands = image.bands();
    let tol = T::from_f64(1e-6).unwrap();
    let mut mu = vec![T::zero(); centroids.len()];
    let mut iterations = 0;
    for _ in 0..config.max_iterations {
        let mut sums = vec![vec![T::zero(); bands]; centroids.len()];
        let mut weights = vec![T::zero(); centroids.len()];
        for px in image.pixels() {
            fcm_memberships(px, &centroids, q, &mut mu);
            for (k, &m) in mu.iter().enumerate() {
                let mq = m.powf(q);
                weights[k] = weights[k] + mq;
                for (s, &v) in sums[k].iter_mut().zip(px) {
                    *s = *s + mq * v;
                }
            }
        }
        let mut movement = T::zero();
        for k in 0..centroids.len() {
            if weights[k] > T::zero() {
                let new: Vec<T> = sums[k].iter().map(|&s| s / weights[k]).collect();
                let step = distance(&new, &centroids[k]);
                if step > movement {
                    movement = step;
                }
                centroids[k] = new;
            }
        }
        iterations += 1;
        if movement < tol {
            break;
        }
    }
    Ok(FcmModel {
        codebook: Codebook::new(centroids)?,
        fuzziness: q,
        iterations,
    })
}

/// Circular lattice distance between units `a` and `b` on a ring of `n`.
pub fn ring_distance(a: usize, b: usize, n: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(n - d)
}

/// 1-D ring Kohonen map. Per sample the winner is the nearest unit; all
/// units move by `eta(t) h(j, j*) (x - w_j)` where the neighborhood width
/// decays exponentially from the initial radius to 0.5 over the epochs.
pub fn som_train<T: Real>(
    image: &MultibandImage<T>,
    config: &TrainConfig<T>,
) -> Result<Codebook<T>> {
    config.validate()?;
    if config.class_count < 2 {
        return Err(Error::InvalidConfig(
            "a ring SOM needs at least two units".into(),
        ));
    }
    let n_g = config.class_count;
    if n_g > image.pixel_count() {
        return Err(Error::InvalidConfig(
            "more units than pixels to sample them from".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    // units start on sampled pixels; unlike k-means, duplicate values are
    // fine because the neighborhood keeps the ring ordered
    let mut units: Vec<Vec<T>> =
        crate::sampling::sample_indices(&mut rng, image.pixel_count(), n_g)
            .into_iter()
            .map(|u| image.pixel(u).to_vec())
            .collect();
    let four = T::from_f64(4.0).unwrap();
    let sigma0 = config
        .initial_radius
        .unwrap_or_else(|| T::from_count(n_g) / four);
    let sigma_end = T::from_f64(0.5).unwrap();
    let two = T::from_f64(2.0).unwrap();
    let epochs = config.max_iterations;
    for epoch in 0..epochs {
        let eta = linear_rate(config.initial_rate, epoch, epochs);
        let sigma = if epochs > 1 {
            let frac = T::from_count(epoch) / T::from_count(epochs - 1);
            sigma0 * (sigma_end / sigma0).powf(frac)
        } else {
            sigma0
        };
        for u in shuffled_indices(image.pixel_count(), &mut rng) {
            let x = image.pixel(u);
            let winner = nearest(x, &units);
            for (j, unit) in units.iter_mut().enumerate() {
                let d = T::from_count(ring_distance(j, winner, n_g));
                let h = match config.neighborhood {
                    Neighborhood::Gaussian => (-(d * d) / (two * sigma * sigma)).exp(),
                    Neighborhood::Rectangular => {
                        if d <= sigma {
                            T::one()
                        } else {
                            T::zero()
                        }
                    }
                };
                if h > T::zero() {
                    let gain = eta * h;
                    for (w, &xj) in unit.iter_mut().zip(x) {
                        *w = *w + gain * (xj - *w);
                    }
                }
            }
        }
    }
    Codebook::new(units)
}
