use std::fs;
use std::path::{Path, PathBuf};

use anchorframe_core::scoring::SelectorConfig;
use anchorframe_core::tracker::TrackerConfig;
use serde::{Deserialize, Serialize};

use crate::error::{AppError, Result};

/// Setting this to `1` forces mock backends whatever the config says.
pub const OFFLINE_ENV: &str = "ANCHORFRAME_OFFLINE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    #[default]
    Mock,
    Remote,
}

/// HTTP service settings. Both services default to the same local host,
/// which may serve `/detect` and `/score` together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceEndpoint {
    pub base_url: String,
    pub timeout_ms: u64,
    pub max_retries: u32,
    pub max_in_flight: usize,
}

impl Default for ServiceEndpoint {
    fn default() -> Self {
        Self { base_url: "http://127.0.0.1:8700".into(), timeout_ms: 10_000, max_retries: 2, max_in_flight: 4 }
    }
}

impl ServiceEndpoint {
    pub fn validate(&self, name: &str) -> Result<()> {
        if self.timeout_ms == 0 {
            return Err(AppError::Usage(format!("{name}.timeout_ms must be positive")));
        }
        if self.max_in_flight == 0 {
            return Err(AppError::Usage(format!("{name}.max_in_flight must be at least 1")));
        }
        if !(self.base_url.starts_with("http://") || self.base_url.starts_with("https://")) {
            return Err(AppError::Usage(format!("{name}.base_url {:?} is not an http(s) URL", self.base_url)));
        }
        Ok(())
    }
}

/// Ground-truth driven stand-ins for the detector and the attribute scorer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MockConfig {
    /// Sidecar ground truth; defaults to `truth.json` inside the frames directory.
    pub truth: Option<PathBuf>,
    /// Standard deviation in pixels of the Gaussian offset applied to box centres.
    pub box_jitter: f64,
    /// Standard deviation of the half-normal amount subtracted from detector scores.
    pub score_noise: f64,
    /// Frames whose target visibility falls below this yield no detection.
    pub visibility_threshold: f64,
}

impl Default for MockConfig {
    fn default() -> Self {
        Self { truth: None, box_jitter: 0.0, score_noise: 0.0, visibility_threshold: 0.25 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CliConfig {
    pub selector: SelectorConfig,
    pub tracker: TrackerConfig,
    pub backend: BackendKind,
    pub detector: ServiceEndpoint,
    pub vlm: ServiceEndpoint,
    pub mock: MockConfig,
    pub seed: u64,
}

impl Default for CliConfig {
    fn default() -> Self {
        Self {
            selector: SelectorConfig::default(),
            tracker: TrackerConfig::default(),
            backend: BackendKind::Mock,
            detector: ServiceEndpoint::default(),
            vlm: ServiceEndpoint::default(),
            mock: MockConfig::default(),
            seed: 0,
        }
    }
}

impl CliConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| AppError::json(path, e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.selector.validate()?;
        self.tracker.validate()?;
        self.detector.validate("detector")?;
        self.vlm.validate("vlm")?;
        let m = &self.mock;
        if !(m.box_jitter >= 0.0 && m.box_jitter.is_finite()) || !(m.score_noise >= 0.0 && m.score_noise.is_finite()) {
            return Err(AppError::Usage("mock.box_jitter and mock.score_noise must be finite and non-negative".into()));
        }
        if !(0.0..=1.0).contains(&m.visibility_threshold) {
            return Err(AppError::Usage(format!(
                "mock.visibility_threshold {} must lie in [0, 1]",
                m.visibility_threshold
            )));
        }
        Ok(())
    }

    /// The backend actually used, after the offline override.
    pub fn effective_backend(&self) -> BackendKind {
        if offline_forced() {
            BackendKind::Mock
        } else {
            self.backend
        }
    }
}

pub fn offline_forced() -> bool {
    std::env::var(OFFLINE_ENV).is_ok_and(|v| v == "1")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_published_settings() {
        let c = CliConfig::default();
        assert_eq!(c.selector.tau, 0.05);
        assert_eq!((c.selector.delta_t, c.selector.top_m), (5, 5));
        assert_eq!((c.selector.lambda_b, c.selector.lambda_c, c.selector.lambda_p), (0.5, 0.3, 0.2));
        assert_eq!(c.detector.timeout_ms, 10_000);
        assert_eq!(c.detector.max_retries, 2);
        assert_eq!(c.vlm.max_in_flight, 4);
        assert_eq!(c.mock.visibility_threshold, 0.25);
        c.validate().unwrap();
    }

    #[test]
    fn partial_files_override_defaults() {
        let c: CliConfig = serde_json::from_str(r#"{"selector": {"top_m": 3}, "vlm": {"max_retries": 0}}"#).unwrap();
        assert_eq!(c.selector.top_m, 3);
        assert_eq!(c.selector.tau, 0.05);
        assert_eq!(c.vlm.max_retries, 0);
        assert_eq!(c.vlm.base_url, CliConfig::default().vlm.base_url);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<CliConfig>(r#"{"selectr": {}}"#).is_err());
        assert!(serde_json::from_str::<CliConfig>(r#"{"selector": {"tau": 0.1, "beta": 2}}"#).is_err());
        assert!(serde_json::from_str::<CliConfig>(r#"{"tracker": {"padding": 2, "cells": 4}}"#).is_err());
        assert!(serde_json::from_str::<CliConfig>(r#"{"backend": "grpc"}"#).is_err());
    }

    #[test]
    fn invalid_values_are_rejected() {
        let mut c = CliConfig::default();
        c.detector.timeout_ms = 0;
        assert!(c.validate().is_err());
        let mut c = CliConfig::default();
        c.selector.tau = 0.0;
        assert!(c.validate().is_err());
        let mut c = CliConfig::default();
        c.mock.visibility_threshold = 1.5;
        assert!(c.validate().is_err());
    }
}
