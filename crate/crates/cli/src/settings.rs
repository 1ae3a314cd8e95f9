//! Merges flags, the optional config file and defaults (in that order).

use std::fs;
use std::path::Path;

use serde::Deserialize;
use zrsim_core::utility::UtilitySpec;
use zrsim_core::ModelParams;

use crate::args::{ModelArgs, SweepArgs, UtilityKind};
use crate::error::CliError;

pub const DEFAULT_P: f64 = 0.35;
pub const DEFAULT_C: f64 = 4.0;
pub const DEFAULT_T: f64 = 3.0;
pub const DEFAULT_EXPONENT: f64 = 0.5;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub sweep: SweepSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub p: Option<f64>,
    pub c: Option<f64>,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    pub a1: Option<f64>,
    pub a2: Option<f64>,
    pub utility: Option<UtilityKind>,
    pub exponent: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub rho: Option<f64>,
    pub grid: Option<usize>,
    pub a_max: Option<f64>,
    pub max_rounds: Option<usize>,
    pub threads: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path).map_err(|source| CliError::ConfigRead {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|source| CliError::ConfigParse {
            path: path.to_path_buf(),
            source: Box::new(source),
        })
    }

    pub fn params(&self, flags: &ModelArgs) -> Result<ModelParams, CliError> {
        let m = &self.model;
        let p = flags.p.or(m.p).unwrap_or(DEFAULT_P);
        let c = flags.c.or(m.c).unwrap_or(DEFAULT_C);
        let t1 = flags.t1.or(m.t1).unwrap_or(DEFAULT_T);
        let t2 = flags.t2.or(m.t2).unwrap_or(DEFAULT_T);
        let a1 = flags.a1.or(m.a1).unwrap_or(0.0);
        let a2 = flags.a2.or(m.a2).unwrap_or(0.0);
        let utility = match flags.utility.or(m.utility).unwrap_or(UtilityKind::Log) {
            UtilityKind::Log => UtilitySpec::LogOnePlus,
            UtilityKind::Custom => {
                let k = flags.exponent.or(m.exponent).unwrap_or(DEFAULT_EXPONENT);
                // sampled check range covers the whole capacity
                let upper = if c.is_finite() && c > 0.0 { c } else { 1.0 };
                UtilitySpec::power(k, upper)?
            }
        };
        Ok(ModelParams::new(p, c, t1, t2, a1, a2, utility)?)
    }

    /// Sweep knobs with flags (or `ZRSIM_THREADS`) ahead of the file.
    pub fn sweep(&self, flags: &SweepArgs) -> SweepArgs {
        let s = &self.sweep;
        SweepArgs {
            grid: flags.grid.or(s.grid),
            a_max: flags.a_max.or(s.a_max),
            max_rounds: flags.max_rounds.or(s.max_rounds),
            threads: flags.threads.or(s.threads),
        }
    }

    pub fn rho(&self, flag: Option<f64>) -> Result<f64, CliError> {
        flag.or(self.sweep.rho)
            .ok_or_else(|| CliError::Usage("`--rho` is required (flag or [sweep] rho in the config file)".into()))
    }
}
