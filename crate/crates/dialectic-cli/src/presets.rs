//! Named method presets and the training dispatch.
//!
//! The baseline presets (KO, CM, KM, XM) and the dialectical presets
//! (ODC-CAN/PME, the EQ/IC x CAN/PME optimized k-means family) ship with
//! their published default parameters; any field can be overridden per run.

use std::fmt;
use std::str::FromStr;

use anyhow::{anyhow, bail, Result};
use serde::Deserialize;

use dialectic::clustering::{
    fcm_train, kmeans_train, som_train, xmeans_select, Neighborhood, TrainConfig, XMeansConfig,
    XMeansScore,
};
use dialectic::odc::{odc_train, OdcConfig, OdcPhaseRecord};
use dialectic::odm::{Direction, MembershipKind, OdmConfig, Trace};
use dialectic::opt_kmeans::{opt_kmeans_train, OptKmConfig, OptKmObjective};
use dialectic::{Codebook64, Image64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Ko,
    Cm,
    Km,
    Xm,
    OdcCan,
    OdcPme,
    EqCanKm,
    IcCanKm,
    EqPmeKm,
    IcPmeKm,
}

pub const ALL_METHODS: [Method; 10] = [
    Method::Ko,
    Method::Cm,
    Method::Km,
    Method::Xm,
    Method::OdcCan,
    Method::OdcPme,
    Method::EqCanKm,
    Method::IcCanKm,
    Method::EqPmeKm,
    Method::IcPmeKm,
];

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Ko => "KO",
            Method::Cm => "CM",
            Method::Km => "KM",
            Method::Xm => "XM",
            Method::OdcCan => "ODC-CAN",
            Method::OdcPme => "ODC-PME",
            Method::EqCanKm => "EQ-CAN-KM",
            Method::IcCanKm => "IC-CAN-KM",
            Method::EqPmeKm => "EQ-PME-KM",
            Method::IcPmeKm => "IC-PME-KM",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.to_ascii_uppercase();
        ALL_METHODS
            .iter()
            .copied()
            .find(|m| m.name() == up)
            .ok_or_else(|| {
                anyhow!(
                    "unknown method {s:?}; expected one of {}",
                    ALL_METHODS.map(|m| m.name()).join(", ")
                )
            })
    }
}

/// Optional per-run parameter overrides; unset fields keep preset values.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodOverrides {
    pub classes: Option<usize>,
    pub max_iterations: Option<usize>,
    pub initial_rate: Option<f64>,
    pub fuzziness: Option<f64>,
    pub neighborhood: Option<String>,
    pub initial_radius: Option<f64>,
    pub initial_poles: Option<usize>,
    pub phases: Option<usize>,
    pub phase_length: Option<usize>,
    pub min_force: Option<f64>,
    pub min_contradiction: Option<f64>,
    pub max_contradiction: Option<f64>,
    pub max_crisis: Option<f64>,
    pub max_poles: Option<usize>,
    pub synthesis: Option<bool>,
    pub gibbs_lambda0: Option<f64>,
    pub step_decay: Option<f64>,
    pub objective_threshold: Option<f64>,
    pub warm_start: Option<usize>,
    pub subsample: Option<f64>,
    pub min_classes: Option<usize>,
    pub max_classes: Option<usize>,
    pub restarts: Option<usize>,
}

impl MethodOverrides {
    /// Parses a `key=value` pair from the command line.
    pub fn set(&mut self, pair: &str) -> Result<()> {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| anyhow!("expected key=value, got {pair:?}"))?;
        macro_rules! parse {
            ($field:ident) => {
                self.$field = Some(value.parse().map_err(|e| anyhow!("{key}: {e}"))?)
            };
        }
        match key {
            "classes" => parse!(classes),
            "max_iterations" => parse!(max_iterations),
            "initial_rate" => parse!(initial_rate),
            "fuzziness" => parse!(fuzziness),
            "neighborhood" => self.neighborhood = Some(value.to_string()),
            "initial_radius" => parse!(initial_radius),
            "initial_poles" => parse!(initial_poles),
            "phases" => parse!(phases),
            "phase_length" => parse!(phase_length),
            "min_force" => parse!(min_force),
            "min_contradiction" => parse!(min_contradiction),
            "max_contradiction" => parse!(max_contradiction),
            "max_crisis" => parse!(max_crisis),
            "max_poles" => parse!(max_poles),
            "synthesis" => parse!(synthesis),
            "gibbs_lambda0" => parse!(gibbs_lambda0),
            "step_decay" => parse!(step_decay),
            "objective_threshold" => parse!(objective_threshold),
            "warm_start" => parse!(warm_start),
            "subsample" => parse!(subsample),
            "min_classes" => parse!(min_classes),
            "max_classes" => parse!(max_classes),
            "restarts" => parse!(restarts),
            other => bail!("unknown parameter {other:?}"),
        }
        Ok(())
    }

    fn neighborhood(&self) -> Result<Option<Neighborhood>> {
        match self.neighborhood.as_deref() {
            None => Ok(None),
            Some("gaussian") => Ok(Some(Neighborhood::Gaussian)),
            Some("rectangular") => Ok(Some(Neighborhood::Rectangular)),
            Some(other) => bail!("unknown neighborhood {other:?}"),
        }
    }
}

/// A trained model plus the bookkeeping the experiment CSV needs.
pub struct Trained {
    pub codebook: Codebook64,
    pub classes_final: usize,
    /// Work spent, in full-image-pass equivalents (epochs, candidate
    /// evaluations plus warm-start passes, or phase iterations).
    pub evaluations: u64,
    pub odm_trace: Option<Trace<f64>>,
    pub odc_history: Option<Vec<OdcPhaseRecord<f64>>>,
}

fn baseline_config(classes: usize, seed: u64, o: &MethodOverrides) -> Result<TrainConfig<f64>> {
    let mut cfg = TrainConfig::new(o.classes.unwrap_or(classes), seed);
    // published defaults: 200 iterations, initial rate 0.1
    if let Some(v) = o.max_iterations {
        cfg.max_iterations = v;
    }
    if let Some(v) = o.initial_rate {
        cfg.initial_rate = v;
    }
    if let Some(v) = o.fuzziness {
        cfg.fuzziness = v;
    }
    if let Some(n) = o.neighborhood()? {
        cfg.neighborhood = n;
    }
    if let Some(v) = o.initial_radius {
        cfg.initial_radius = Some(v);
    }
    Ok(cfg)
}

fn odc_config(kind: MembershipKind, seed: u64, o: &MethodOverrides) -> OdcConfig<f64> {
    // 14 initial poles, 2 phases of 150 iterations, step 0.1, 5% force,
    // contradictions 0.01/0.98, crisis 0.35, up to 12 poles
    let mut cfg = OdcConfig::new(o.initial_poles.unwrap_or(14), kind, seed);
    cfg.historical_phases = o.phases.unwrap_or(2);
    cfg.phase_length = o.phase_length.unwrap_or(150);
    cfg.initial_step = o.initial_rate.unwrap_or(0.1);
    cfg.min_force = o.min_force.unwrap_or(0.05);
    cfg.min_contradiction = o.min_contradiction.unwrap_or(0.01);
    cfg.max_contradiction = o.max_contradiction.unwrap_or(0.98);
    cfg.max_crisis = o.max_crisis.unwrap_or(0.35);
    cfg.max_poles = o.max_poles.unwrap_or(12);
    if let Some(v) = o.step_decay {
        cfg.step_decay = v;
    }
    if let Some(v) = o.synthesis {
        cfg.enable_synthesis = v;
    }
    if let Some(v) = o.gibbs_lambda0 {
        cfg.gibbs_lambda0 = Some(v);
    }
    cfg
}

fn optkm_config(
    membership: MembershipKind,
    objective: OptKmObjective,
    seed: u64,
    o: &MethodOverrides,
) -> OptKmConfig<f64> {
    // 13 classes, 20 poles, up to 10 phases of 20 generations, steps 0.99,
    // contradictions 0.1/0.9, crisis 0.9, stop threshold 0.01, 5 warm-start
    // k-means iterations
    let mut odm = OdmConfig::new(Direction::Minimize, membership, seed);
    odm.initial_poles = o.initial_poles.unwrap_or(20);
    odm.historical_phases = o.phases.unwrap_or(10);
    odm.phase_length = o.phase_length.unwrap_or(20);
    odm.initial_step = o.initial_rate.unwrap_or(0.99);
    odm.min_contradiction = o.min_contradiction.unwrap_or(0.1);
    odm.max_contradiction = o.max_contradiction.unwrap_or(0.9);
    odm.max_crisis = o.max_crisis.unwrap_or(0.9);
    odm.objective_threshold = o.objective_threshold.or(Some(0.01));
    odm.max_poles = o.max_poles;
    if let Some(v) = o.step_decay {
        odm.step_decay = v;
    }
    let mut cfg = OptKmConfig::new(o.classes.unwrap_or(13), odm, objective);
    if let Some(v) = o.warm_start {
        cfg.warm_start_iterations = v;
    }
    if let Some(v) = o.subsample {
        cfg.subsample = Some(v);
    }
    cfg
}

/// Trains `method` on `image` under `seed`, returning the codebook and the
/// accounting used by the experiment runner.
pub fn train_method(
    method: Method,
    image: &Image64,
    seed: u64,
    overrides: &MethodOverrides,
) -> Result<Trained> {
    let passes_per_epoch = 1u64;
    match method {
        Method::Ko => {
            let cfg = baseline_config(13, seed, overrides)?;
            let codebook = som_train(image, &cfg)?;
            Ok(Trained {
                classes_final: codebook.len(),
                codebook,
                evaluations: cfg.max_iterations as u64 * passes_per_epoch,
                odm_trace: None,
                odc_history: None,
            })
        }
        Method::Cm => {
            let cfg = baseline_config(13, seed, overrides)?;
            let model = fcm_train(image, &cfg)?;
            Ok(Trained {
                classes_final: model.codebook.len(),
                codebook: model.codebook,
                evaluations: model.iterations as u64 * passes_per_epoch,
                odm_trace: None,
                odc_history: None,
            })
        }
        Method::Km => {
            let cfg = baseline_config(13, seed, overrides)?;
            let codebook = kmeans_train(image, &cfg)?;
            Ok(Trained {
                classes_final: codebook.len(),
                codebook,
                evaluations: cfg.max_iterations as u64 * passes_per_epoch,
                odm_trace: None,
                odc_history: None,
            })
        }
        Method::Xm => {
            // sweep 10..14 by the Omran index, as published
            let inner = baseline_config(13, seed, overrides)?;
            let mut cfg = XMeansConfig::new(
                overrides.min_classes.unwrap_or(10),
                overrides.max_classes.unwrap_or(14),
                inner,
            );
            cfg.score = XMeansScore::OmranIndex;
            if let Some(r) = overrides.restarts {
                cfg.restarts = r;
            }
            let sweep = (cfg.max_classes - cfg.min_classes + 1) as u64;
            let out = xmeans_select(image, &cfg)?;
            Ok(Trained {
                classes_final: out.best_classes,
                codebook: out.codebook,
                evaluations: sweep
                    * cfg.restarts as u64
                    * cfg.inner.max_iterations as u64
                    * passes_per_epoch,
                odm_trace: None,
                odc_history: None,
            })
        }
        Method::OdcCan | Method::OdcPme => {
            let kind = if method == Method::OdcCan {
                MembershipKind::Canonical
            } else {
                MembershipKind::MaxEntropy
            };
            let cfg = odc_config(kind, seed, overrides);
            let model = odc_train(image, &cfg)?;
            Ok(Trained {
                classes_final: model.codebook.len(),
                codebook: model.codebook,
                evaluations: (cfg.historical_phases * cfg.phase_length) as u64 * passes_per_epoch,
                odm_trace: None,
                odc_history: Some(model.history),
            })
        }
        Method::EqCanKm | Method::IcCanKm | Method::EqPmeKm | Method::IcPmeKm => {
            let membership = match method {
                Method::EqCanKm | Method::IcCanKm => MembershipKind::Canonical,
                _ => MembershipKind::MaxEntropy,
            };
            let objective = match method {
                Method::EqCanKm | Method::EqPmeKm => OptKmObjective::QuantizationError,
                _ => OptKmObjective::OmranIndex,
            };
            let cfg = optkm_config(membership, objective, seed, overrides);
            let out = opt_kmeans_train(image, &cfg)?;
            Ok(Trained {
                classes_final: out.codebook.len(),
                codebook: out.codebook,
                evaluations: out.warm_start_passes + out.trace.evaluations,
                odm_trace: Some(out.trace),
                odc_history: None,
            })
        }
    }
}
