//! Serializable certificate records shared by the operator and conjugation
//! checks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub name: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub check: String,
    pub inputs: BTreeMap<String, Value>,
    pub residuals: Vec<Residual>,
    pub verdict: String,
    pub tolerances: BTreeMap<String, f64>,
    pub truncation: usize,
}

impl Certificate {
    pub fn new(check: &str, verdict: &str, truncation: usize) -> Self {
        Self {
            check: check.to_string(),
            inputs: BTreeMap::new(),
            residuals: Vec::new(),
            verdict: verdict.to_string(),
            tolerances: BTreeMap::new(),
            truncation,
        }
    }

    pub fn input(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.inputs.insert(key.to_string(), v);
        self
    }

    pub fn residual(mut self, name: &str, value: f64) -> Self {
        self.residuals.push(Residual {
            name: name.to_string(),
            value,
        });
        self
    }

    pub fn tolerance(mut self, name: &str, value: f64) -> Self {
        self.tolerances.insert(name.to_string(), value);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate is plain data")
    }
}

/// Grid of concentric circles `R_k = k * delta`, `k = 1..=circles`, plus the
/// origin; angles start at zero so the grid is symmetric under conjugation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingSpec {
    pub delta: f64,
    pub circles: usize,
    pub angles: usize,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        Self {
            delta: 0.5,
            circles: 24,
            angles: 64,
        }
    }
}

impl SamplingSpec {
    pub fn radii(&self) -> Vec<f64> {
        (0..=self.circles).map(|k| k as f64 * self.delta).collect()
    }
}
