//! Optimized k-means: the k-means training loop is replaced by a
//! dialectical search over concatenated-centroid candidate vectors,
//! minimizing either the quantization error or the Omran combined index.
//! Half of the initial poles are warm-started codebooks (a few Lloyd
//! iterations from seeded pixel samples), the other half their box
//! antitheses.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::clustering::{lloyd_iterations, sample_initial_centroids};
use crate::error::{Error, Result};
use crate::image::MultibandImage;
use crate::metrics::{omran_index, quantization_error};
use crate::odm::{self, Direction, IterationRecord, OdmConfig, OdmOutcome, Trace};
use crate::real::Real;
use crate::search::SearchBox;
use crate::seed::derive_seed;
use crate::vq::{classify, Codebook};

const WARM_TAG: u64 = 0x77_61_72_6d; // "warm"
const SUBSAMPLE_TAG: u64 = 0x73_75_62_73; // "subs"

/// Which cluster-quality index the search minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptKmObjective {
    QuantizationError,
    OmranIndex,
}

#[derive(Debug, Clone)]
pub struct OptKmConfig<T> {
    pub class_count: usize,
    /// Inner optimizer settings; the direction is forced to minimize.
    pub odm: OdmConfig<T>,
    pub objective: OptKmObjective,
    /// Deterministic Lloyd iterations seeding each warm-start pole.
    pub warm_start_iterations: usize,
    pub omran_weights: [T; 3],
    /// Optional fraction of pixels used when evaluating candidates;
    /// `None` evaluates on the full image.
    pub subsample: Option<T>,
}

impl<T: Real> OptKmConfig<T> {
    pub fn new(class_count: usize, odm: OdmConfig<T>, objective: OptKmObjective) -> Self {
        Self {
            class_count,
            odm,
            objective,
            warm_start_iterations: 5,
            omran_weights: crate::metrics::equal_omran_weights(),
            subsample: None,
        }
    }
}

/// Search outcome: the decoded codebook, the final objective value, the
/// optimizer trace and the evaluation accounting needed for fair budget
/// comparisons.
#[derive(Debug, Clone)]
pub struct OptKmOutcome<T> {
    pub codebook: Codebook<T>,
    pub objective_value: T,
    pub trace: Trace<T>,
    /// Full-image passes spent on the Lloyd warm starts.
    pub warm_start_passes: u64,
    /// Fraction of pixels each objective evaluation visited (1 = exact).
    pub subsample_fraction: T,
}

/// Concatenates the centroids into one candidate vector; centroid `i`
/// occupies components `[i*bands, (i+1)*bands)`.
pub fn encode_candidate<T: Real>(codebook: &Codebook<T>) -> Vec<T> {
    let mut x = Vec::with_capacity(codebook.len() * codebook.dim());
    for c in codebook.centroids() {
        x.extend_from_slice(c);
    }
    x
}

/// Splits a candidate vector back into a codebook of `classes` centroids.
pub fn decode_candidate<T: Real>(x: &[T], classes: usize, bands: usize) -> Result<Codebook<T>> {
    if classes == 0 || bands == 0 || x.len() != classes * bands {
        return Err(Error::DimensionMismatch(format!(
            "candidate length {} does not split into {} centroids of {} bands",
            x.len(),
            classes,
            bands
        )));
    }
    Codebook::new(x.chunks_exact(bands).map(|c| c.to_vec()).collect())
}

fn evaluation_image<T: Real>(
    image: &MultibandImage<T>,
    subsample: Option<T>,
    seed: u64,
) -> Result<(MultibandImage<T>, T)> {
    match subsample {
        None => Ok((image.clone(), T::one())),
        Some(f) => {
            if !(f > T::zero() && f <= T::one()) {
                return Err(Error::InvalidConfig(
                    "subsample fraction must be in (0, 1]".into(),
                ));
            }
            if f == T::one() {
                return Ok((image.clone(), T::one()));
            }
            let n = image.pixel_count();
            let count = (f * T::from_count(n))
                .ceil()
                .to_usize()
                .unwrap_or(n)
                .clamp(1, n);
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, SUBSAMPLE_TAG, 0));
            let mut picks = crate::sampling::sample_indices(&mut rng, n, count);
            picks.sort_unstable();
            let mut data = Vec::with_capacity(count * image.bands());
            for u in picks {
                data.extend_from_slice(image.pixel(u));
            }
            let sub = MultibandImage::new(1, count, image.bands(), data)?;
            Ok((sub, T::from_count(count) / T::from_count(n)))
        }
    }
}

/// Trains an optimized k-means codebook by dialectical search.
pub fn opt_kmeans_train<T: Real>(
    image: &MultibandImage<T>,
    config: &OptKmConfig<T>,
) -> Result<OptKmOutcome<T>> {
    let n_g = config.class_count;
    let bands = image.bands();
    if n_g == 0 {
        return Err(Error::InvalidConfig("class count must be positive".into()));
    }
    if n_g < 2 && config.objective == OptKmObjective::OmranIndex {
        return Err(Error::InvalidConfig(
            "the Omran index needs at least two classes".into(),
        ));
    }
    if config.odm.initial_poles < 2 || !config.odm.initial_poles.is_multiple_of(2) {
        return Err(Error::InvalidConfig(
            "initial pole count must be even and at least 2".into(),
        ));
    }

    let (eval_image, fraction) = evaluation_image(image, config.subsample, config.odm.rng_seed)?;

    // half warm-started codebooks, half their antitheses
    let half = config.odm.initial_poles / 2;
    let domain = SearchBox::<T>::unit(n_g * bands);
    let mut initial = Vec::with_capacity(config.odm.initial_poles);
    for p in 0..half {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.odm.rng_seed, WARM_TAG, p as u64));
        let seeds = sample_initial_centroids(image, n_g, &mut rng)?;
        let warmed = lloyd_iterations(image, seeds, config.warm_start_iterations);
        let candidate = encode_candidate(&Codebook::new(warmed)?);
        initial.push(candidate);
    }
    for p in 0..half {
        initial.push(domain.antithesis(&initial[p]));
    }
    let warm_start_passes = (config.warm_start_iterations * half) as u64;

    let weights = config.omran_weights;
    let objective_kind = config.objective;
    let objective = |x: &[T]| -> T {
        let codebook = decode_candidate(x, n_g, bands).expect("domain dimension fixed");
        let labels = classify(&eval_image, &codebook).expect("band count fixed");
        match objective_kind {
            OptKmObjective::QuantizationError => {
                quantization_error(&eval_image, &codebook, &labels)
                    .expect("validated inputs")
                    .0
            }
            OptKmObjective::OmranIndex => {
                omran_index(&eval_image, &codebook, &labels, weights, T::one())
                    .expect("validated inputs")
            }
        }
    };

    let mut odm_config = config.odm.clone();
    odm_config.direction = Direction::Minimize;

    let outcome = if odm_config.historical_phases == 0 {
        // degenerate budget: score the warm starts and keep the best
        best_initial(objective, initial)?
    } else {
        odm::optimize_seeded(objective, &domain, &odm_config, initial)?
    };

    let codebook = decode_candidate(&outcome.best_point, n_g, bands)?;
    Ok(OptKmOutcome {
        codebook,
        objective_value: outcome.best_value,
        trace: outcome.trace,
        warm_start_passes,
        subsample_fraction: fraction,
    })
}

fn best_initial<T: Real>(
    mut objective: impl FnMut(&[T]) -> T,
    initial: Vec<Vec<T>>,
) -> Result<OdmOutcome<T>> {
    let mut best: Option<(Vec<T>, T)> = None;
    let mut evaluations = 0u64;
    for x in initial {
        let f = objective(&x);
        if !f.is_finite() {
            return Err(Error::NonFiniteObjective {
                point: x.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect(),
            });
        }
        evaluations += 1;
        if best.as_ref().is_none_or(|(_, bf)| f < *bf) {
            best = Some((x, f));
        }
    }
    let (best_point, best_value) = best.expect("non-empty initial set");
    let trace = Trace {
        iterations: vec![IterationRecord {
            iteration: 0,
            phase: 0,
            pole_count: evaluations as usize,
            current_value: best_value,
            historical_value: best_value,
            evaluations,
        }],
        crises: Vec::new(),
        evaluations,
    };
    Ok(OdmOutcome {
        best_point,
        best_value,
        trace,
    })
}
