//! Run configuration: TOML file plus command-line overrides.

use std::path::Path;

use esec_core::event_chain::EsecConfig;
use esec_core::predict::PredictorConfig;
use esec_core::similarity::SimilarityConfig;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Predictor settings other than the similarity flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PredictorSection {
    pub refs_per_class: usize,
    pub margin: f64,
    pub seed: u64,
    pub persistence: usize,
}

impl Default for PredictorSection {
    fn default() -> Self {
        let d = PredictorConfig::default();
        PredictorSection {
            refs_per_class: d.refs_per_class,
            margin: d.margin,
            seed: d.seed,
            persistence: d.persistence,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub esec: EsecConfig,
    pub similarity: SimilarityConfig,
    pub predictor: PredictorSection,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        self.esec.validate()?;
        self.predictor_config().validate()?;
        Ok(())
    }

    pub fn predictor_config(&self) -> PredictorConfig {
        PredictorConfig {
            refs_per_class: self.predictor.refs_per_class,
            margin: self.predictor.margin,
            seed: self.predictor.seed,
            persistence: self.predictor.persistence,
            similarity: self.similarity,
        }
    }
}
