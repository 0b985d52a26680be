//! Scenario reports and their JSON serialization.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ScenarioConfig;
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub paper_ref: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    /// Passes when `residual <= tolerance`; NaN never passes.
    pub fn bounded_by(name: &str, tag: &str, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            paper_ref: tag.into(),
            residual,
            tolerance,
            pass: residual <= tolerance,
            detail: None,
        }
    }

    /// Passes when `residual > threshold`: a defect that must be visible.
    pub fn exceeds(name: &str, tag: &str, residual: f64, threshold: f64) -> Self {
        Self {
            pass: residual > threshold,
            ..Self::bounded_by(name, tag, residual, threshold)
        }
    }

    pub fn verdict(name: &str, tag: &str, residual: f64, tolerance: f64, pass: bool) -> Self {
        Self {
            pass,
            ..Self::bounded_by(name, tag, residual, tolerance)
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub scenario: String,
    pub config_echo: ScenarioConfig,
    pub checks: Vec<Check>,
    pub verdict: String,
}

impl Report {
    pub fn new(config: ScenarioConfig, checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            scenario: config.scenario.clone(),
            config_echo: config,
            checks,
            verdict: if pass { "pass" } else { "fail" }.to_string(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is plain data");
        s.push('\n');
        s
    }
}

pub fn emit_report(r: &Report, path: &Path) -> Result<()> {
    std::fs::write(path, r.to_json())?;
    Ok(())
}
