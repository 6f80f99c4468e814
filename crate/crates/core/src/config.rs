//! Simulator configuration.
//!
//! A config file is TOML with four optional tables — `[field]`, `[radio]`,
//! `[protocol]`, `[engine]` — every key defaulted, so the empty file is the
//! reference setup (500 nodes on 100 m x 100 m, 0.5 J, the standard radio
//! constants, 4000-bit messages). Unknown keys and type errors surface with
//! the offending key and line; constraint violations name the key.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clustering::MergeRule;
use crate::radio::RadioParams;
use crate::topology::FieldConfig;

/// Protocol-level knobs shared by the five protocols.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolParams {
    /// Desired head fraction for LEACH and FUZZY-LEACH.
    pub p: f64,
    /// Head count for LEACH-C and K-means; unset means ceil(0.05 * N) for
    /// cross-protocol comparability.
    pub k_clusters: Option<usize>,
    /// Neighbor-list length for the rank-order clustering step.
    pub knn_k: usize,
    /// Merge threshold (the parameter C) for the one-pass merge.
    pub merge_threshold: f64,
    /// Which pairwise distance gates merges.
    pub merge_rule: MergeRule,
    /// Simulated-annealing proposals per head per round (LEACH-C).
    pub anneal_proposals_per_ch: usize,
    /// Lloyd convergence tolerance in meters.
    pub kmeans_tolerance: f64,
    /// Lloyd iteration cap.
    pub kmeans_max_iters: usize,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        ProtocolParams {
            p: 0.05,
            k_clusters: None,
            knn_k: 12,
            merge_threshold: 0.5,
            merge_rule: MergeRule::AsymPresence,
            anneal_proposals_per_ch: 200,
            kmeans_tolerance: 1e-6,
            kmeans_max_iters: 100,
        }
    }
}

impl ProtocolParams {
    pub fn effective_k_clusters(&self, n_nodes: usize) -> usize {
        self.k_clusters
            .unwrap_or_else(|| (0.05 * n_nodes as f64).ceil() as usize)
            .max(1)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(ConfigError::constraint("protocol.p", "must be in (0, 1)"));
        }
        if self.k_clusters == Some(0) {
            return Err(ConfigError::constraint("protocol.k_clusters", "must be >= 1"));
        }
        if self.knn_k == 0 {
            return Err(ConfigError::constraint("protocol.knn_k", "must be >= 1"));
        }
        if !(self.merge_threshold >= 0.0) {
            return Err(ConfigError::constraint(
                "protocol.merge_threshold",
                "must be >= 0",
            ));
        }
        if self.anneal_proposals_per_ch == 0 {
            return Err(ConfigError::constraint(
                "protocol.anneal_proposals_per_ch",
                "must be >= 1",
            ));
        }
        if self.kmeans_max_iters == 0 {
            return Err(ConfigError::constraint(
                "protocol.kmeans_max_iters",
                "must be >= 1",
            ));
        }
        Ok(())
    }
}

/// Engine-level knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineParams {
    /// Hard stop if the last node has not died by this round.
    pub round_cap: usize,
}

impl Default for EngineParams {
    fn default() -> Self {
        EngineParams { round_cap: 10_000 }
    }
}

/// The full simulator configuration.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub field: FieldConfig,
    pub radio: RadioParams,
    pub protocol: ProtocolParams,
    pub engine: EngineParams,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file: {0}")]
    Io(#[from] std::io::Error),
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config key {key}: {reason}")]
    Constraint { key: String, reason: String },
}

impl ConfigError {
    fn constraint(key: &str, reason: &str) -> Self {
        ConfigError::Constraint {
            key: key.to_string(),
            reason: reason.to_string(),
        }
    }
}

impl SimConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: SimConfig =
            toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.field
            .validate()
            .map_err(|e| ConfigError::Parse(e.to_string()))?;
        self.radio
            .validate()
            .map_err(|e| ConfigError::Parse(e.to_string()))?;
        self.protocol.validate()?;
        if self.engine.round_cap == 0 {
            return Err(ConfigError::constraint("engine.round_cap", "must be >= 1"));
        }
        Ok(())
    }

    /// Clone with a different master seed (sweep helper).
    pub fn with_seed(&self, seed: u64) -> Self {
        let mut cfg = self.clone();
        cfg.field.rng_seed = seed;
        cfg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_reference_setup() {
        let cfg = SimConfig::from_toml_str("").unwrap();
        assert_eq!(cfg.field.n_nodes, 500);
        assert_eq!(cfg.field.width, 100.0);
        assert_eq!(cfg.field.initial_energy, 0.5);
        assert_eq!(cfg.radio.e_elec, 50e-9);
        assert_eq!(cfg.radio.e_fs, 10e-12);
        assert_eq!(cfg.radio.e_mp, 0.0013e-12);
        assert_eq!(cfg.radio.e_da, 5e-9);
        assert_eq!(cfg.radio.msg_bits, 4000);
        assert_eq!(cfg.protocol.p, 0.05);
        assert_eq!(cfg.protocol.knn_k, 12);
        assert_eq!(cfg.protocol.merge_threshold, 0.5);
        assert_eq!(cfg.protocol.effective_k_clusters(500), 25);
        assert_eq!(cfg.engine.round_cap, 10_000);
    }

    #[test]
    fn negative_amplifier_constant_rejected() {
        let err = SimConfig::from_toml_str("[radio]\ne_fs = -1.0\n").unwrap_err();
        assert!(err.to_string().contains("e_fs"), "{err}");
    }

    #[test]
    fn unknown_key_names_the_key() {
        let err = SimConfig::from_toml_str("[radio]\ne_phi = 3.0\n").unwrap_err();
        assert!(err.to_string().contains("e_phi"), "{err}");
    }

    #[test]
    fn type_error_is_diagnosed() {
        let err = SimConfig::from_toml_str("[field]\nn_nodes = \"many\"\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("n_nodes") || msg.contains("line"), "{msg}");
    }

    #[test]
    fn override_round_trips_through_serialization() {
        let cfg = SimConfig::from_toml_str("[radio]\nmsg_bits = 2000\n").unwrap();
        assert_eq!(cfg.radio.msg_bits, 2000);
        let echoed = toml::to_string(&cfg).unwrap();
        assert!(echoed.contains("msg_bits = 2000"));
    }

    #[test]
    fn bad_protocol_params_rejected() {
        assert!(SimConfig::from_toml_str("[protocol]\np = 1.5\n").is_err());
        assert!(SimConfig::from_toml_str("[protocol]\nknn_k = 0\n").is_err());
    }
}
