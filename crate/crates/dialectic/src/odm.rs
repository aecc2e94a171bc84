//! The dialectical optimization method: a derivative-free box-domain
//! optimizer driven by a pole population. Each historical phase runs `n_H`
//! evolution iterations (poles move toward the current and historical
//! hegemons, damped by membership) and ends in a revolutionary crisis
//! (fusion of low-contradiction pairs, synthesis from principal
//! contradictions, Gaussian crisis noise, antithesis doubling).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::real::Real;
use crate::search::{contradiction, synthesis, Pole, PoleSet, SearchBox};

/// Whether the objective is minimized or maximized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
}

/// Which membership formula drives the evolution damping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MembershipKind {
    Canonical,
    MaxEntropy,
}

/// Optimizer parameters.
#[derive(Debug, Clone)]
pub struct OdmConfig<T> {
    /// Initial pole count m(0); must be even (half are antitheses).
    pub initial_poles: usize,
    /// Number of historical phases n_P.
    pub historical_phases: usize,
    /// Evolution iterations per phase n_H.
    pub phase_length: usize,
    /// Initial step eta_0 in (0, 1), shared by the current and historical steps.
    pub initial_step: T,
    /// Per-update decay factor alpha in (0, 1).
    pub step_decay: T,
    /// Fusion threshold delta_min in [0, 1].
    pub min_contradiction: T,
    /// Synthesis threshold delta_max in [0, 1].
    pub max_contradiction: T,
    /// Crisis noise amplitude chi_max >= 0.
    pub max_crisis: T,
    /// Optional early-stop threshold on the historical hegemonic value.
    pub objective_threshold: Option<T>,
    /// Optional cap on the pole count, enforced at crisis end by dropping
    /// the worst poles first.
    pub max_poles: Option<usize>,
    pub direction: Direction,
    pub membership: MembershipKind,
    pub rng_seed: u64,
}

impl<T: Real> OdmConfig<T> {
    /// Default configuration: m(0)=8, 5 phases of 50 iterations,
    /// eta_0=0.1, alpha=0.9999, delta_min=0.05, delta_max=0.9, chi_max=0.3.
    pub fn new(direction: Direction, membership: MembershipKind, rng_seed: u64) -> Self {
        Self {
            initial_poles: 8,
            historical_phases: 5,
            phase_length: 50,
            initial_step: T::from_f64(0.1).unwrap(),
            step_decay: T::from_f64(0.9999).unwrap(),
            min_contradiction: T::from_f64(0.05).unwrap(),
            max_contradiction: T::from_f64(0.9).unwrap(),
            max_crisis: T::from_f64(0.3).unwrap(),
            objective_threshold: None,
            max_poles: None,
            direction,
            membership,
            rng_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.initial_poles < 2 || !self.initial_poles.is_multiple_of(2) {
            return Err(Error::InvalidConfig(
                "initial pole count must be even and at least 2".into(),
            ));
        }
        if self.historical_phases == 0 || self.phase_length == 0 {
            return Err(Error::InvalidConfig(
                "phase counts must be positive".into(),
            ));
        }
        let zero = T::zero();
        let one = T::one();
        if !(self.initial_step > zero && self.initial_step < one) {
            return Err(Error::InvalidConfig("initial step must be in (0,1)".into()));
        }
        if !(self.step_decay > zero && self.step_decay < one) {
            return Err(Error::InvalidConfig("step decay must be in (0,1)".into()));
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
        if self.max_poles == Some(0) {
            return Err(Error::InvalidConfig("max poles must be positive".into()));
        }
        Ok(())
    }
}

/// The best pole of the current iteration and the best pole observed so far.
#[derive(Debug, Clone, PartialEq)]
pub struct Hegemony<T> {
    pub current_pole: Vec<T>,
    pub current_value: T,
    pub historical_pole: Vec<T>,
    pub historical_value: T,
}

fn better<T: Real>(a: T, b: T, direction: Direction) -> bool {
    match direction {
        Direction::Maximize => a > b,
        Direction::Minimize => a < b,
    }
}

impl<T: Real> Hegemony<T> {
    /// Hegemony of a fresh pole set (historical = current).
    pub fn from_pole_set(poles: &PoleSet<T>, direction: Direction) -> Self {
        let mut best = 0;
        for (i, p) in poles.poles.iter().enumerate().skip(1) {
            if better(p.objective, poles.poles[best].objective, direction) {
                best = i;
            }
        }
        let w = poles.poles[best].weights.clone();
        let f = poles.poles[best].objective;
        Self {
            current_pole: w.clone(),
            current_value: f,
            historical_pole: w,
            historical_value: f,
        }
    }

    /// Refreshes the current hegemon from the poles and promotes it to
    /// historical when it improves on the best seen so far.
    pub fn refresh(&mut self, poles: &PoleSet<T>, direction: Direction) {
        let mut best = 0;
        for (i, p) in poles.poles.iter().enumerate().skip(1) {
            if better(p.objective, poles.poles[best].objective, direction) {
                best = i;
            }
        }
        self.current_pole = poles.poles[best].weights.clone();
        self.current_value = poles.poles[best].objective;
        if better(self.current_value, self.historical_value, direction) {
            self.historical_pole = self.current_pole.clone();
            self.historical_value = self.current_value;
        }
    }
}

/// Current and historical membership vectors over the pole set; each sums
/// to 1 and lies in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Membership<T> {
    pub current: Vec<T>,
    pub historical: Vec<T>,
}

impl<T: Real> Membership<T> {
    pub fn canonical(poles: &PoleSet<T>, hegemony: &Hegemony<T>) -> Self {
        let objectives: Vec<T> = poles.objectives().collect();
        Self {
            current: canonical_weights(&objectives, hegemony.current_value),
            historical: canonical_weights(&objectives, hegemony.historical_value),
        }
    }

    /// Maximum-entropy memberships with the Lagrange multipliers
    /// `lambda_H = lambda_C = 1/m(t)`.
    pub fn max_entropy(poles: &PoleSet<T>, hegemony: &Hegemony<T>) -> Self {
        let objectives: Vec<T> = poles.objectives().collect();
        let lambda = T::one() / T::from_count(poles.len());
        Self {
            current: max_entropy_weights(&objectives, hegemony.current_value, lambda),
            historical: max_entropy_weights(&objectives, hegemony.historical_value, lambda),
        }
    }

    pub fn compute(kind: MembershipKind, poles: &PoleSet<T>, hegemony: &Hegemony<T>) -> Self {
        match kind {
            MembershipKind::Canonical => Self::canonical(poles, hegemony),
            MembershipKind::MaxEntropy => Self::max_entropy(poles, hegemony),
        }
    }
}

/// Canonical membership of each value against a hegemonic reference:
/// `mu_i = (sum_j |f_i - f_ref| / |f_j - f_ref|)^-1`, which normalizes the
/// inverse distances. Values at exactly zero distance share membership
/// equally; everything else then gets zero (the formula's limit).
pub fn canonical_weights<T: Real>(objectives: &[T], reference: T) -> Vec<T> {
    let distances: Vec<T> = objectives.iter().map(|&f| (f - reference).abs()).collect();
    let zeros = distances.iter().filter(|&&d| d == T::zero()).count();
    if zeros > 0 {
        let share = T::one() / T::from_count(zeros);
        return distances
            .iter()
            .map(|&d| if d == T::zero() { share } else { T::zero() })
            .collect();
    }
    let inverses: Vec<T> = distances.iter().map(|&d| T::one() / d).collect();
    let sum: T = inverses.iter().copied().sum();
    inverses.into_iter().map(|w| w / sum).collect()
}

/// Maximum-entropy membership of each value against a reference:
/// `mu_i = exp(-lambda |f_i - f_ref|) / sum_j exp(-lambda |f_j - f_ref|)`.
/// Shift-invariant softmax evaluation keeps it stable for large distances.
pub fn max_entropy_weights<T: Real>(objectives: &[T], reference: T, lambda: T) -> Vec<T> {
    let distances: Vec<T> = objectives.iter().map(|&f| (f - reference).abs()).collect();
    let d_min = distances
        .iter()
        .copied()
        .fold(T::infinity(), |a, b| if b < a { b } else { a });
    let weights: Vec<T> = distances
        .iter()
        .map(|&d| (-(lambda * (d - d_min))).exp())
        .collect();
    let sum: T = weights.iter().copied().sum();
    weights.into_iter().map(|w| w / sum).collect()
}

/// One evolution update, before re-evaluation:
/// `w_i <- w_i + eta_C (1-mu_C_i)^2 (w_C - w_i) + eta_H (1-mu_H_i)^2 (w_H - w_i)`,
/// clamped into the domain.
pub fn evolution_positions<T: Real>(
    poles: &PoleSet<T>,
    hegemony: &Hegemony<T>,
    memberships: &Membership<T>,
    eta_current: T,
    eta_historical: T,
    domain: &SearchBox<T>,
) -> Vec<Vec<T>> {
    let one = T::one();
    poles
        .poles
        .iter()
        .enumerate()
        .map(|(i, pole)| {
            let dc = one - memberships.current[i];
            let dh = one - memberships.historical[i];
            let gain_c = eta_current * dc * dc;
            let gain_h = eta_historical * dh * dh;
            let mut w: Vec<T> = pole
                .weights
                .iter()
                .zip(hegemony.current_pole.iter().zip(&hegemony.historical_pole))
                .map(|(&wj, (&cj, &hj))| wj + gain_c * (cj - wj) + gain_h * (hj - wj))
                .collect();
            domain.clamp(&mut w);
            w
        })
        .collect()
}

/// Multiplicative step decay: returns `alpha * eta`.
pub fn decay_step<T: Real>(eta: T, alpha: T) -> T {
    alpha * eta
}

/// Initial pole positions: the first half uniform in the box, the second
/// half the absolute antitheses of the first.
pub fn init_positions<T: Real, R: Rng + ?Sized>(
    domain: &SearchBox<T>,
    initial_poles: usize,
    rng: &mut R,
) -> Vec<Vec<T>> {
    let half = initial_poles / 2;
    let mut positions: Vec<Vec<T>> = (0..half).map(|_| domain.sample(rng)).collect();
    for i in 0..half {
        positions.push(domain.antithesis(&positions[i]));
    }
    positions
}

/// Per-iteration trace record.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord<T> {
    pub iteration: usize,
    pub phase: usize,
    pub pole_count: usize,
    pub current_value: T,
    pub historical_value: T,
    pub evaluations: u64,
}

/// Pole-count bookkeeping for one revolutionary crisis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrisisRecord {
    pub phase: usize,
    pub before: usize,
    pub after_fusion: usize,
    pub after_synthesis: usize,
    /// Step 4 ran (the phase was not final and the stop criterion unmet).
    pub doubled: bool,
    pub after_doubling: usize,
    pub after_cap: usize,
}

/// Full run trace: one record per evolution iteration (plus the initial
/// state at iteration 0) and one per crisis.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace<T> {
    pub iterations: Vec<IterationRecord<T>>,
    pub crises: Vec<CrisisRecord>,
    pub evaluations: u64,
}

/// Result of an optimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct OdmOutcome<T> {
    pub best_point: Vec<T>,
    pub best_value: T,
    pub trace: Trace<T>,
}

struct Engine<'a, T, F> {
    config: &'a OdmConfig<T>,
    domain: &'a SearchBox<T>,
    objective: F,
    evaluations: u64,
}

impl<'a, T: Real, F: FnMut(&[T]) -> T> Engine<'a, T, F> {
    /// Evaluates the raw objective, mapping to the internal maximize
    /// convention and rejecting non-finite values.
    fn eval(&mut self, point: &[T]) -> Result<T> {
        let raw = (self.objective)(point);
        if !raw.is_finite() {
            return Err(Error::NonFiniteObjective {
                point: point
                    .iter()
                    .map(|v| v.to_f64().unwrap_or(f64::NAN))
                    .collect(),
            });
        }
        self.evaluations += 1;
        Ok(match self.config.direction {
            Direction::Maximize => raw,
            Direction::Minimize => -raw,
        })
    }

    fn to_user(&self, internal: T) -> T {
        match self.config.direction {
            Direction::Maximize => internal,
            Direction::Minimize => -internal,
        }
    }

    fn threshold_reached(&self, hegemony: &Hegemony<T>) -> bool {
        match self.config.objective_threshold {
            None => false,
            Some(f_sup) => {
                let internal_sup = match self.config.direction {
                    Direction::Maximize => f_sup,
                    Direction::Minimize => -f_sup,
                };
                hegemony.historical_value >= internal_sup
            }
        }
    }

    /// Revolutionary crisis: fusion, synthesis, crisis noise, antithesis
    /// doubling (skipped on the final phase), then the optional pole cap.
    fn crisis(
        &mut self,
        poles: &mut Vec<Pole<T>>,
        phase: usize,
        double: bool,
        rng: &mut ChaCha8Rng,
    ) -> Result<CrisisRecord> {
        let before = poles.len();

        // step 1: fuse pairs below delta_min, keeping the better pole;
        // pairs are scanned in index order, skipping already-fused poles
        let mut alive = vec![true; poles.len()];
        for i in 0..poles.len() {
            if !alive[i] {
                continue;
            }
            for j in i + 1..poles.len() {
                if !alive[j] {
                    continue;
                }
                let delta = contradiction(&poles[i].weights, &poles[j].weights, self.domain);
                if delta <= self.config.min_contradiction {
                    if poles[j].objective > poles[i].objective {
                        alive[i] = false;
                        break;
                    } else {
                        alive[j] = false;
                    }
                }
            }
        }
        let mut keep = alive.iter();
        poles.retain(|_| *keep.next().unwrap());
        let after_fusion = poles.len();

        // step 2: append a synthesis pole for every principal contradiction
        let mut born: Vec<Vec<T>> = Vec::new();
        for i in 0..poles.len() {
            for j in i + 1..poles.len() {
                let delta = contradiction(&poles[i].weights, &poles[j].weights, self.domain);
                if delta > self.config.max_contradiction {
                    born.push(synthesis(&poles[i].weights, &poles[j].weights));
                }
            }
        }
        let mut dirty: Vec<bool> = vec![false; poles.len()];
        for w in born {
            poles.push(Pole::new(w, T::nan()));
            dirty.push(true);
        }
        let after_synthesis = poles.len();

        // step 3: crisis noise on every pole of the restructured set
        if self.config.max_crisis > T::zero() {
            for (pole, flag) in poles.iter_mut().zip(dirty.iter_mut()) {
                for w in pole.weights.iter_mut() {
                    *w = *w + self.config.max_crisis * T::sample_standard_normal(rng);
                }
                self.domain.clamp(&mut pole.weights);
                *flag = true;
            }
        }

        // step 4: antithesis doubling
        if double {
            for i in 0..after_synthesis {
                let w = self.domain.antithesis(&poles[i].weights);
                poles.push(Pole::new(w, T::nan()));
                dirty.push(true);
            }
        }
        let after_doubling = poles.len();

        for (pole, &flag) in poles.iter_mut().zip(&dirty) {
            if flag {
                pole.objective = self.eval(&pole.weights)?;
            }
        }

        // optional cap: drop the worst poles first, preserving order
        if let Some(cap) = self.config.max_poles {
            if poles.len() > cap {
                let mut order: Vec<usize> = (0..poles.len()).collect();
                order.sort_by(|&a, &b| {
                    poles[b]
                        .objective
                        .partial_cmp(&poles[a].objective)
                        .expect("finite objectives")
                        .then(a.cmp(&b))
                });
                let mut keep = vec![false; poles.len()];
                for &i in order.iter().take(cap) {
                    keep[i] = true;
                }
                let mut it = keep.iter();
                poles.retain(|_| *it.next().unwrap());
            }
        }
        let after_cap = poles.len();

        Ok(CrisisRecord {
            phase,
            before,
            after_fusion,
            after_synthesis,
            doubled: double,
            after_doubling,
            after_cap,
        })
    }
}

/// Optimizes `objective` over `domain`, initializing the pole set from the
/// seeded uniform/antithesis scheme.
pub fn optimize<T: Real, F: FnMut(&[T]) -> T>(
    objective: F,
    domain: &SearchBox<T>,
    config: &OdmConfig<T>,
) -> Result<OdmOutcome<T>> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let positions = init_positions(domain, config.initial_poles, &mut rng);
    run(objective, domain, config, positions, rng)
}

/// Optimizes from caller-provided initial pole positions (used by the
/// optimized k-means front end, which seeds warm-started codebooks).
pub fn optimize_seeded<T: Real, F: FnMut(&[T]) -> T>(
    objective: F,
    domain: &SearchBox<T>,
    config: &OdmConfig<T>,
    initial: Vec<Vec<T>>,
) -> Result<OdmOutcome<T>> {
    config.validate()?;
    if initial.is_empty() {
        return Err(Error::InvalidConfig("no initial poles supplied".into()));
    }
    if initial.iter().any(|w| w.len() != domain.dim()) {
        return Err(Error::DimensionMismatch(
            "initial pole dimension differs from the domain".into(),
        ));
    }
    let rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    run(objective, domain, config, initial, rng)
}

fn run<T: Real, F: FnMut(&[T]) -> T>(
    objective: F,
    domain: &SearchBox<T>,
    config: &OdmConfig<T>,
    positions: Vec<Vec<T>>,
    mut rng: ChaCha8Rng,
) -> Result<OdmOutcome<T>> {
    let mut engine = Engine {
        config,
        domain,
        objective,
        evaluations: 0,
    };

    let mut poles = Vec::with_capacity(positions.len());
    for mut w in positions {
        domain.clamp(&mut w);
        let f = engine.eval(&w)?;
        poles.push(Pole::new(w, f));
    }
    let mut set = PoleSet::new(poles)?;
    // internal hegemony comparisons always maximize (minimize is negated)
    let mut hegemony = Hegemony::from_pole_set(&set, Direction::Maximize);

    let mut trace = Trace {
        iterations: Vec::new(),
        crises: Vec::new(),
        evaluations: 0,
    };
    trace.iterations.push(IterationRecord {
        iteration: 0,
        phase: 0,
        pole_count: set.len(),
        current_value: engine.to_user(hegemony.current_value),
        historical_value: engine.to_user(hegemony.historical_value),
        evaluations: engine.evaluations,
    });

    let mut eta_current = config.initial_step;
    let mut eta_historical = config.initial_step;
    let mut iteration = 0usize;

    'phases: for phase in 0..config.historical_phases {
        if engine.threshold_reached(&hegemony) {
            break 'phases;
        }
        set.phase_index = phase;
        for _ in 0..config.phase_length {
            if engine.threshold_reached(&hegemony) {
                break;
            }
            let memberships = Membership::compute(config.membership, &set, &hegemony);
            let next = evolution_positions(
                &set,
                &hegemony,
                &memberships,
                eta_current,
                eta_historical,
                domain,
            );
            for (pole, w) in set.poles.iter_mut().zip(next) {
                let f = engine.eval(&w)?;
                pole.weights = w;
                pole.objective = f;
            }
            hegemony.refresh(&set, Direction::Maximize);
            eta_current = decay_step(eta_current, config.step_decay);
            iteration += 1;
            set.iteration_index = iteration;
            trace.iterations.push(IterationRecord {
                iteration,
                phase,
                pole_count: set.len(),
                current_value: engine.to_user(hegemony.current_value),
                historical_value: engine.to_user(hegemony.historical_value),
                evaluations: engine.evaluations,
            });
        }
        eta_historical = decay_step(eta_historical, config.step_decay);

        let double =
            phase + 1 < config.historical_phases && !engine.threshold_reached(&hegemony);
        let record = engine.crisis(&mut set.poles, phase, double, &mut rng)?;
        trace.crises.push(record);
        hegemony.refresh(&set, Direction::Maximize);
    }

    trace.evaluations = engine.evaluations;
    let best_value = engine.to_user(hegemony.historical_value);
    Ok(OdmOutcome {
        best_point: hegemony.historical_pole,
        best_value,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pole_set(objectives: &[f64]) -> PoleSet<f64> {
        PoleSet::new(
            objectives
                .iter()
                .map(|&f| Pole::new(vec![f], f))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn canonical_membership_examples() {
        // distances (1, 3) from the reference
        let mu = canonical_weights(&[1.0f64, 3.0], 0.0);
        assert!((mu[0] - 0.75).abs() < 1e-15);
        assert!((mu[1] - 0.25).abs() < 1e-15);

        // unique exact hit takes membership 1
        let mu = canonical_weights(&[5.0f64, 7.0, 9.0], 5.0);
        assert_eq!(mu, vec![1.0, 0.0, 0.0]);

        // equal distances are uniform
        let mu = canonical_weights(&[2.0f64, -2.0, 2.0, -2.0], 0.0);
        for &m in &mu {
            assert!((m - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn max_entropy_membership_examples() {
        // distances (0, ln 2) with lambda = 1 -> (2/3, 1/3)
        let mu = max_entropy_weights(&[0.0, 2f64.ln()], 0.0, 1.0);
        assert!((mu[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((mu[1] - 1.0 / 3.0).abs() < 1e-15);

        // equal distances are uniform
        let mu = max_entropy_weights(&[4.0f64, 4.0, 4.0], 0.0, 1.0);
        for &m in &mu {
            assert!((m - 1.0 / 3.0).abs() < 1e-15);
        }

        // lambda -> 0 approaches uniform even for spread distances
        let mu = max_entropy_weights(&[0.0f64, 10.0, 50.0], 0.0, 1e-12);
        for &m in &mu {
            assert!((m - 1.0 / 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn membership_vectors_sum_to_one() {
        let set = pole_set(&[0.3, 1.7, -2.0, 0.3]);
        let hegemony = Hegemony::from_pole_set(&set, Direction::Maximize);
        for membership in [
            Membership::canonical(&set, &hegemony),
            Membership::max_entropy(&set, &hegemony),
        ] {
            for v in [&membership.current, &membership.historical] {
                let sum: f64 = v.iter().sum();
                assert!((sum - 1.0).abs() < 1e-12);
                assert!(v.iter().all(|&m| (0.0..=1.0).contains(&m)));
            }
        }
    }

    #[test]
    fn evolution_examples() {
        let domain = SearchBox::<f64>::unit(1);
        // 1-D: w=0, w_C=w_H=1, mu=0, eta=0.1 -> 0.2
        let set = pole_set(&[0.0]);
        let hegemony = Hegemony {
            current_pole: vec![1.0],
            current_value: 1.0,
            historical_pole: vec![1.0],
            historical_value: 1.0,
        };
        let memberships = Membership {
            current: vec![0.0],
            historical: vec![0.0],
        };
        let out = evolution_positions(&set, &hegemony, &memberships, 0.1, 0.1, &domain);
        assert!((out[0][0] - 0.2).abs() < 1e-15);

        // full membership freezes the pole regardless of position
        let memberships = Membership {
            current: vec![1.0],
            historical: vec![1.0],
        };
        let out = evolution_positions(&set, &hegemony, &memberships, 0.9, 0.9, &domain);
        assert_eq!(out[0][0], 0.0);

        // a pole equal to both hegemons does not move
        let set = pole_set(&[1.0]);
        let set = PoleSet::new(vec![Pole::new(vec![1.0], set.poles[0].objective)]).unwrap();
        let memberships = Membership {
            current: vec![0.3],
            historical: vec![0.3],
        };
        let out = evolution_positions(&set, &hegemony, &memberships, 0.5, 0.5, &domain);
        assert_eq!(out[0][0], 1.0);
    }

    #[test]
    fn decay_examples() {
        assert!((decay_step(0.1f64, 0.9999) - 0.09999).abs() < 1e-15);
        assert_eq!(decay_step(0.0f64, 0.5), 0.0);
        let mut eta = 0.25f64;
        for _ in 0..8 {
            eta = decay_step(eta, 0.5);
        }
        assert!((eta - 0.25 * 0.5f64.powi(8)).abs() < 1e-18);
    }

    #[test]
    fn init_positions_pairs_theses_with_antitheses() {
        use rand::SeedableRng;
        let domain = SearchBox::<f64>::unit(3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let positions = init_positions(&domain, 4, &mut rng);
        assert_eq!(positions.len(), 4);
        for i in 0..2 {
            let anti = domain.antithesis(&positions[i]);
            assert_eq!(positions[i + 2], anti);
        }
    }

    #[test]
    fn constant_objective_keeps_hegemony_flat() {
        let domain = SearchBox::new(vec![-1.0f64, -1.0], vec![1.0, 1.0]).unwrap();
        let mut config = OdmConfig::new(Direction::Maximize, MembershipKind::Canonical, 3);
        config.historical_phases = 2;
        config.phase_length = 5;
        let outcome = optimize(|_| 4.25, &domain, &config).unwrap();
        assert_eq!(outcome.best_value, 4.25);
        assert!(outcome
            .trace
            .iterations
            .iter()
            .all(|r| r.historical_value == 4.25));
    }

    #[test]
    fn threshold_met_at_init_stops_immediately() {
        let domain = SearchBox::new(vec![-1.0f64], vec![1.0]).unwrap();
        let mut config = OdmConfig::new(Direction::Minimize, MembershipKind::Canonical, 5);
        config.objective_threshold = Some(10.0); // any value beats this
        let outcome = optimize(|w| w[0] * w[0], &domain, &config).unwrap();
        // only the initial record; zero evolution iterations
        assert_eq!(outcome.trace.iterations.len(), 1);
        assert!(outcome.trace.crises.is_empty());
    }

    #[test]
    fn nan_objective_aborts_with_diagnostic() {
        let domain = SearchBox::new(vec![-1.0f64], vec![1.0]).unwrap();
        let config = OdmConfig::new(Direction::Minimize, MembershipKind::Canonical, 5);
        let err = optimize(|_| f64::NAN, &domain, &config).unwrap_err();
        assert!(matches!(err, Error::NonFiniteObjective { .. }));
    }

    #[test]
    fn sphere_reaches_near_zero() {
        let domain = SearchBox::new(vec![-5.0f64, -5.0], vec![5.0, 5.0]).unwrap();
        let config = OdmConfig::new(Direction::Minimize, MembershipKind::Canonical, 42);
        let outcome = optimize(|w| w.iter().map(|&x| x * x).sum(), &domain, &config).unwrap();
        assert!(outcome.best_value < 1e-3, "got {}", outcome.best_value);
        // the trace is monotone non-increasing for minimization
        let mut prev = f64::INFINITY;
        for r in &outcome.trace.iterations {
            assert!(r.historical_value <= prev + 1e-15);
            prev = r.historical_value;
        }
    }

    #[test]
    fn evaluation_count_matches_objective_calls_exactly() {
        use std::cell::Cell;
        let calls = Cell::new(0u64);
        let domain = SearchBox::new(vec![-2.0f64, -2.0], vec![2.0, 2.0]).unwrap();
        let mut config = OdmConfig::new(Direction::Minimize, MembershipKind::Canonical, 8);
        config.historical_phases = 3;
        config.phase_length = 7;
        config.max_poles = Some(6);
        let outcome = optimize(
            |w: &[f64]| {
                calls.set(calls.get() + 1);
                w.iter().map(|&x| x * x).sum()
            },
            &domain,
            &config,
        )
        .unwrap();
        assert_eq!(outcome.trace.evaluations, calls.get());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let base = OdmConfig::<f64>::new(Direction::Minimize, MembershipKind::Canonical, 0);
        let mut odd = base.clone();
        odd.initial_poles = 7;
        assert!(odd.validate().is_err());
        let mut decay = base.clone();
        decay.step_decay = 1.0;
        assert!(decay.validate().is_err());
        let mut step = base.clone();
        step.initial_step = 0.0;
        assert!(step.validate().is_err());
        let mut deltas = base.clone();
        deltas.min_contradiction = 0.9;
        deltas.max_contradiction = 0.5;
        assert!(deltas.validate().is_err());
        assert!(base.validate().is_ok());
    }

    #[test]
    fn identical_seeds_are_bit_identical() {
        let domain = SearchBox::new(vec![-5.0f64, -5.0], vec![5.0, 5.0]).unwrap();
        let config = OdmConfig::new(Direction::Minimize, MembershipKind::MaxEntropy, 9);
        let a = optimize(|w| w.iter().map(|&x| x * x).sum(), &domain, &config).unwrap();
        let b = optimize(|w| w.iter().map(|&x| x * x).sum(), &domain, &config).unwrap();
        assert_eq!(a.best_point, b.best_point);
        assert_eq!(a.trace.iterations, b.trace.iterations);
        assert_eq!(a.trace.crises, b.trace.crises);
    }

    #[test]
    fn fusion_of_identical_poles_keeps_one() {
        // two identical poles and delta_min=0.01: one survivor
        let domain = SearchBox::<f64>::unit(1);
        let mut cfg = OdmConfig::new(Direction::Maximize, MembershipKind::Canonical, 1);
        cfg.min_contradiction = 0.01;
        cfg.max_crisis = 0.0;
        let mut engine = Engine {
            config: &cfg,
            domain: &domain,
            objective: |w: &[f64]| w[0],
            evaluations: 0,
        };
        let mut poles = vec![Pole::new(vec![0.4], 0.4), Pole::new(vec![0.4], 0.4)];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let rec = engine.crisis(&mut poles, 0, false, &mut rng).unwrap();
        assert_eq!(rec.after_fusion, 1);
        assert_eq!(poles.len(), 1);
    }

    #[test]
    fn synthesis_appended_for_principal_contradiction() {
        let domain = SearchBox::<f64>::unit(2);
        let mut cfg = OdmConfig::new(Direction::Maximize, MembershipKind::Canonical, 1);
        cfg.min_contradiction = 0.01;
        cfg.max_contradiction = 0.9;
        cfg.max_crisis = 0.0;
        let mut engine = Engine {
            config: &cfg,
            domain: &domain,
            objective: |w: &[f64]| w[0] + w[1],
            evaluations: 0,
        };
        let mut poles = vec![
            Pole::new(vec![0.0, 0.0], 0.0),
            Pole::new(vec![1.0, 1.0], 2.0),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let rec = engine.crisis(&mut poles, 0, false, &mut rng).unwrap();
        assert_eq!(rec.after_synthesis, 3);
        assert_eq!(poles[2].weights, vec![0.5, 0.5]);
    }

    #[test]
    fn doubling_appends_antitheses() {
        let domain = SearchBox::<f64>::unit(1);
        let mut cfg = OdmConfig::new(Direction::Maximize, MembershipKind::Canonical, 1);
        cfg.min_contradiction = 0.0;
        cfg.max_crisis = 0.0;
        let mut engine = Engine {
            config: &cfg,
            domain: &domain,
            objective: |w: &[f64]| w[0],
            evaluations: 0,
        };
        let mut poles = vec![Pole::new(vec![0.2], 0.2), Pole::new(vec![0.7], 0.7)];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let rec = engine.crisis(&mut poles, 0, true, &mut rng).unwrap();
        assert!(rec.doubled);
        assert_eq!(rec.after_doubling, 2 * rec.after_synthesis);
        assert!((poles[2].weights[0] - 0.8).abs() < 1e-15);
        assert!((poles[3].weights[0] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn pole_cap_drops_worst_first() {
        let domain = SearchBox::<f64>::unit(1);
        let mut cfg = OdmConfig::new(Direction::Maximize, MembershipKind::Canonical, 1);
        cfg.min_contradiction = 0.0;
        cfg.max_crisis = 0.0;
        cfg.max_poles = Some(2);
        let mut engine = Engine {
            config: &cfg,
            domain: &domain,
            objective: |w: &[f64]| w[0],
            evaluations: 0,
        };
        let mut poles = vec![
            Pole::new(vec![0.1], 0.1),
            Pole::new(vec![0.9], 0.9),
            Pole::new(vec![0.5], 0.5),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let rec = engine.crisis(&mut poles, 0, false, &mut rng).unwrap();
        assert_eq!(rec.after_cap, 2);
        // the two best survive in their original order
        assert_eq!(poles[0].weights, vec![0.9]);
        assert_eq!(poles[1].weights, vec![0.5]);
    }
}
