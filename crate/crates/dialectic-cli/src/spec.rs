//! Experiment specification: the TOML file consumed by `run`.

use std::collections::HashMap;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use crate::phantom::PhantomSpec;
use crate::presets::{Method, MethodOverrides};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    /// Per-band grayscale rasters stacked in order.
    pub bands: Option<Vec<PathBuf>>,
    /// A multiband composition header.
    pub mb: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub methods: Vec<String>,
    #[serde(default = "default_noise")]
    pub noise_levels: Vec<f64>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Output directory; overridable by `--out` and `DIALECTIC_OUT_DIR`.
    pub outputs: Option<PathBuf>,
    /// Record wall-clock times in the CSV. Off by default so reruns are
    /// byte-identical.
    #[serde(default)]
    pub timing: bool,
    pub phantom: Option<PhantomSpec>,
    pub input: Option<InputSpec>,
    #[serde(default)]
    pub overrides: HashMap<String, MethodOverrides>,
    /// Fuzziness used by the XB validity column.
    #[serde(default = "default_fuzziness")]
    pub fuzziness: f64,
}

fn default_noise() -> Vec<f64> {
    vec![0.0]
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn default_fuzziness() -> f64 {
    2.0
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = toml::from_str(text).context("parsing experiment spec")?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            bail!("the spec lists no methods");
        }
        if self.noise_levels.is_empty() || self.seeds.is_empty() {
            bail!("noise_levels and seeds must be non-empty");
        }
        match (&self.phantom, &self.input) {
            (Some(_), Some(_)) => bail!("give either [phantom] or [input], not both"),
            (None, None) => bail!("the spec needs a [phantom] or [input] section"),
            (Some(p), None) => p.validate()?,
            (None, Some(i)) => {
                if i.bands.is_none() == i.mb.is_none() {
                    bail!("[input] needs exactly one of `bands` or `mb`");
                }
            }
        }
        for name in self.overrides.keys() {
            name.parse::<Method>()?;
        }
        self.parsed_methods()?;
        Ok(())
    }

    pub fn parsed_methods(&self) -> Result<Vec<Method>> {
        self.methods.iter().map(|m| m.parse()).collect()
    }

    pub fn overrides_for(&self, method: Method) -> MethodOverrides {
        self.overrides
            .get(method.name())
            .cloned()
            .unwrap_or_default()
    }
}
