use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::NetConfig;
use super::mlp::Mlp;
use crate::metadb::Scaler;
use crate::{Error, Result};

pub const CHECKPOINT_VERSION: u32 = 1;

/// JSON checkpoint: config, input scaler and parameters at full f64 precision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub config: NetConfig,
    pub scaler: Option<Scaler>,
    pub network: Mlp,
}

impl Checkpoint {
    pub fn new(config: NetConfig, scaler: Option<Scaler>, network: Mlp) -> Self {
        Checkpoint {
            version: CHECKPOINT_VERSION,
            config,
            scaler,
            network,
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let json = serde_json::to_vec(self)?;
        crate::ingest::openml::write_atomic(path, &json)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Checkpoint> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let ckpt: Checkpoint = serde_json::from_slice(&bytes)?;
        if ckpt.version != CHECKPOINT_VERSION {
            return Err(Error::invalid(format!(
                "checkpoint version {} unsupported (expected {CHECKPOINT_VERSION})",
                ckpt.version
            )));
        }
        Ok(ckpt)
    }
}
