//! Reproducibility manifest written beside every run's outputs.

use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputChecksum {
    pub file: String,
    pub sha256: String,
}

/// Everything needed to reproduce a run byte for byte: the software
/// version, the seed and the full config echo.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub seed_base: u64,
    pub replications: usize,
    pub config: RunConfig,
    pub outputs: Vec<OutputChecksum>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

impl Manifest {
    pub fn new(config: &RunConfig, outputs: Vec<OutputChecksum>) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed_base: config.seed_base,
            replications: config.replications,
            config: config.clone(),
            outputs,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading manifest {}", path.display()))?;
        serde_json::from_str(&text).context("parsing manifest")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksum_is_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn manifest_round_trips_through_json() {
        let config = RunConfig::default();
        let manifest = Manifest::new(
            &config,
            vec![OutputChecksum {
                file: "metrics.csv".into(),
                sha256: "00".into(),
            }],
        );
        let parsed: Manifest = serde_json::from_str(&manifest.to_json()).unwrap();
        assert_eq!(parsed.config, config);
        assert_eq!(parsed.outputs[0].file, "metrics.csv");
    }
}
