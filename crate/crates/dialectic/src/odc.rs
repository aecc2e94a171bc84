//! The objective dialectical classifier: poles are centroids in feature
//! space. Every pixel presentation pulls each pole toward the pixel with a
//! squared anticontradiction weight; phase-end crises fuse nearby poles,
//! prune weak ones and optionally shake the survivors, so the class count
//! adapts down from the initial guess.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::image::{LabelMap, MultibandImage};
use crate::metrics::fcm_memberships;
use crate::odm::MembershipKind;
use crate::real::{distance, Real};
use crate::sampling::{sample_indices, shuffled_indices};
use crate::vq::{classify, Codebook};

#[derive(Debug, Clone)]
pub struct OdcConfig<T> {
    pub initial_poles: usize,
    pub historical_phases: usize,
    pub phase_length: usize,
    pub initial_step: T,
    /// Per-iteration step decay factor.
    pub step_decay: T,
    /// Minimum class support: poles winning fewer than this fraction of the
    /// pixels are pruned at phase end.
    pub min_force: T,
    pub min_contradiction: T,
    pub max_contradiction: T,
    pub max_crisis: T,
    pub max_poles: usize,
    pub membership: MembershipKind,
    /// Append synthesis poles for principal contradictions at phase end.
    /// Off by default: the classifier only shrinks its class count.
    pub enable_synthesis: bool,
    /// Inverse temperature of the Gibbs anticontradiction at the initial
    /// pole count; it sharpens by the factor m(0)/m(t) as poles fuse.
    /// Defaults to 10 divided by the pixel-box diagonal.
    pub gibbs_lambda0: Option<T>,
    pub rng_seed: u64,
}

impl<T: Real> OdcConfig<T> {
    pub fn new(initial_poles: usize, membership: MembershipKind, rng_seed: u64) -> Self {
        Self {
            initial_poles,
            historical_phases: 2,
            phase_length: 150,
            initial_step: T::from_f64(0.1).unwrap(),
            step_decay: T::from_f64(0.9999).unwrap(),
            min_force: T::from_f64(0.05).unwrap(),
            min_contradiction: T::from_f64(0.01).unwrap(),
            max_contradiction: T::from_f64(0.98).unwrap(),
            max_crisis: T::from_f64(0.35).unwrap(),
            max_poles: initial_poles,
            membership,
            enable_synthesis: false,
            gibbs_lambda0: None,
            rng_seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.initial_poles < 2 {
            return Err(Error::InvalidConfig(
                "the classifier needs at least two initial poles".into(),
            ));
        }
        if self.historical_phases == 0 || self.phase_length == 0 {
            return Err(Error::InvalidConfig("phase counts must be positive".into()));
        }
        let zero = T::zero();
        let one = T::one();
        if !(self.initial_step > zero && self.initial_step < one) {
            return Err(Error::InvalidConfig("initial step must be in (0,1)".into()));
        }
        if !(self.step_decay > zero && self.step_decay < one) {
            return Err(Error::InvalidConfig("step decay must be in (0,1)".into()));
        }
        if !(self.min_force >= zero && self.min_force < one) {
            return Err(Error::InvalidConfig("min force must be in [0,1)".into()));
        }
        if !(self.min_contradiction >= zero
            && self.min_contradiction < self.max_contradiction
            && self.max_contradiction <= one)
        {
            return Err(Error::InvalidConfig(
                "need 0 <= delta_min < delta_max <= 1".into(),
            ));
        }
        if self.max_crisis < zero {
            return Err(Error::InvalidConfig("max crisis must be nonnegative".into()));
        }
        if self.max_poles == 0 {
            return Err(Error::InvalidConfig("max poles must be positive".into()));
        }
        Ok(())
    }
}

/// Pole count, mean winning anticontradiction and per-pole force recorded
/// at each phase end (after fusion and pruning, before crisis noise).
#[derive(Debug, Clone, PartialEq)]
pub struct OdcPhaseRecord<T> {
    pub pole_count: usize,
    pub mean_anticontradiction: T,
    pub forces: Vec<T>,
}

/// A trained classifier: surviving poles as the codebook plus the phase log.
#[derive(Debug, Clone)]
pub struct OdcModel<T> {
    pub codebook: Codebook<T>,
    pub history: Vec<OdcPhaseRecord<T>>,
}

/// Gibbs-form anticontradiction: `exp(-lambda d_i) / sum_j exp(-lambda d_j)`
/// over the distances of one sample to every pole.
pub(crate) fn gibbs_memberships<T: Real>(x: &[T], poles: &[Vec<T>], lambda: T, out: &mut [T]) {
    let mut d_min = T::infinity();
    for (m, p) in out.iter_mut().zip(poles) {
        *m = distance(x, p);
        if *m < d_min {
            d_min = *m;
        }
    }
    let mut sum = T::zero();
    for m in out.iter_mut() {
        *m = (-(lambda * (*m - d_min))).exp();
        sum = sum + *m;
    }
    for m in out.iter_mut() {
        *m = *m / sum;
    }
}

fn anticontradictions<T: Real>(
    x: &[T],
    poles: &[Vec<T>],
    kind: MembershipKind,
    lambda: T,
    out: &mut [T],
) {
    match kind {
        // FCM form with q = 2
        MembershipKind::Canonical => fcm_memberships(x, poles, T::from_f64(2.0).unwrap(), out),
        MembershipKind::MaxEntropy => gibbs_memberships(x, poles, lambda, out),
    }
}

fn default_lambda0<T: Real>(bands: usize) -> T {
    T::from_f64(10.0).unwrap() / T::from_count(bands).sqrt()
}

/// Trains the classifier on the image pixels.
pub fn odc_train<T: Real>(image: &MultibandImage<T>, config: &OdcConfig<T>) -> Result<OdcModel<T>> {
    config.validate()?;
    let n_px = image.pixel_count();
    if config.initial_poles > n_px {
        return Err(Error::InvalidConfig(format!(
            "{} initial poles exceed the {} available pixels",
            config.initial_poles, n_px
        )));
    }
    let bands = image.bands();
    // contradictions are normalized by the pixel-box diagonal
    let diameter = T::from_count(bands).sqrt();
    let lambda0 = config.gibbs_lambda0.unwrap_or_else(|| default_lambda0(bands));
    let m0 = T::from_count(config.initial_poles);

    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut poles: Vec<Vec<T>> = sample_indices(&mut rng, n_px, config.initial_poles)
        .into_iter()
        .map(|u| image.pixel(u).to_vec())
        .collect();

    let mut eta = config.initial_step;
    let mut history = Vec::with_capacity(config.historical_phases);
    let mut mu = vec![T::zero(); poles.len()];

    for phase in 0..config.historical_phases {
        let lambda = lambda0 * m0 / T::from_count(poles.len());
        for _ in 0..config.phase_length {
            for u in shuffled_indices(n_px, &mut rng) {
                let x = image.pixel(u);
                anticontradictions(x, &poles, config.membership, lambda, &mut mu[..poles.len()]);
                for (pole, &m) in poles.iter_mut().zip(mu.iter()) {
                    let gain = eta * m * m;
                    for (w, &xj) in pole.iter_mut().zip(x) {
                        *w = *w + gain * (xj - *w);
                    }
                }
            }
            eta = config.step_decay * eta;
        }

        let final_phase = phase + 1 == config.historical_phases;

        // fusion: poles below the minimum contradiction collapse, lower
        // index surviving; pairs scanned in index order
        let mut alive = vec![true; poles.len()];
        for i in 0..poles.len() {
            if !alive[i] {
                continue;
            }
            for j in i + 1..poles.len() {
                if !alive[j] {
                    continue;
                }
                let delta = distance(&poles[i], &poles[j]) / diameter;
                if delta <= config.min_contradiction {
                    alive[j] = false;
                }
            }
        }
        let mut it = alive.iter();
        poles.retain(|_| *it.next().unwrap());

        if config.enable_synthesis && !final_phase {
            let mut born = Vec::new();
            for i in 0..poles.len() {
                for j in i + 1..poles.len() {
                    let delta = distance(&poles[i], &poles[j]) / diameter;
                    if delta > config.max_contradiction {
                        born.push(crate::search::synthesis(&poles[i], &poles[j]));
                    }
                }
            }
            poles.extend(born);
        }

        // force: fraction of pixels whose strongest anticontradiction is on
        // the pole; also record the mean winning anticontradiction
        let lambda = lambda0 * m0 / T::from_count(poles.len());
        let mut wins = vec![0usize; poles.len()];
        let mut anti_sum = T::zero();
        mu.resize(poles.len(), T::zero());
        for px in image.pixels() {
            anticontradictions(px, &poles, config.membership, lambda, &mut mu[..poles.len()]);
            let mut best = 0;
            for (i, &m) in mu[..poles.len()].iter().enumerate().skip(1) {
                if m > mu[best] {
                    best = i;
                }
            }
            wins[best] += 1;
            anti_sum = anti_sum + mu[best];
        }
        let forces: Vec<T> = wins
            .iter()
            .map(|&w| T::from_count(w) / T::from_count(n_px))
            .collect();
        let mean_anticontradiction = anti_sum / T::from_count(n_px);

        let keep: Vec<bool> = forces.iter().map(|&f| f >= config.min_force).collect();
        if !keep.iter().any(|&k| k) {
            return Err(Error::DegenerateConfiguration(
                "every pole fell below the minimum force; lower min_force".into(),
            ));
        }
        let mut kept_forces: Vec<T> = Vec::new();
        let mut it = keep.iter();
        let mut fi = 0usize;
        poles.retain(|_| {
            let k = *it.next().unwrap();
            if k {
                kept_forces.push(forces[fi]);
            }
            fi += 1;
            k
        });

        // cap: drop the weakest poles first
        if poles.len() > config.max_poles {
            let mut order: Vec<usize> = (0..poles.len()).collect();
            order.sort_by(|&a, &b| {
                kept_forces[b]
                    .partial_cmp(&kept_forces[a])
                    .expect("finite forces")
                    .then(a.cmp(&b))
            });
            let mut keep = vec![false; poles.len()];
            for &i in order.iter().take(config.max_poles) {
                keep[i] = true;
            }
            let mut it = keep.iter();
            poles.retain(|_| *it.next().unwrap());
            let mut it = keep.iter();
            kept_forces.retain(|_| *it.next().unwrap());
        }

        // crisis shake, skipped at the final phase end since the surviving
        // poles are the returned centroids
        if !final_phase && config.max_crisis > T::zero() {
            for pole in poles.iter_mut() {
                for w in pole.iter_mut() {
                    *w = (*w + config.max_crisis * T::sample_standard_normal(&mut rng))
                        .max(T::zero())
                        .min(T::one());
                }
            }
        }

        history.push(OdcPhaseRecord {
            pole_count: poles.len(),
            mean_anticontradiction,
            forces: kept_forces,
        });
        mu.resize(poles.len(), T::zero());
    }

    Ok(OdcModel {
        codebook: Codebook::new(poles)?,
        history,
    })
}

/// Nearest-pole labeling; identical contract to [`classify`].
pub fn odc_classify<T: Real>(image: &MultibandImage<T>, model: &OdcModel<T>) -> Result<LabelMap> {
    classify(image, &model.codebook)
}
