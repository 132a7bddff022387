//! Run configuration: dotted keys under `system.`, `psr.`, `tsr.` and
//! `sweep.`, in TOML syntax. Every key is optional and defaults to the
//! reference operating point.
//!
//! ```text
//! system.relay_offset = 5.0
//! system.inr_db = 20
//! psr.alpha1 = 0.2
//! sweep.variable = "power_db"
//! sweep.start = 40
//! sweep.stop = 80
//! sweep.steps = 81
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{PsrConfig, SystemConfig, TsrConfig};

use super::SweepSpec;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub psr: PsrConfig,
    pub tsr: TsrConfig,
    pub sweep: SweepSpec,
}

impl RunConfig {
    /// Parses a configuration document. Domain checks are left to
    /// [`RunConfig::validate`].
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
                .unwrap_or(0);
            Error::ConfigParse {
                line,
                message: e.message().to_string(),
            }
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        self.psr.validate()?;
        self.tsr.validate()?;
        self.sweep.validate(&self.system)
    }
}
