//! Scenario configuration: a TOML key-value file merged with command-line
//! overrides.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::certificate::SamplingSpec;
use crate::error::{Error, Result};
use crate::fock::QuadratureSpec;
use crate::operators::{exp_truncation_degree, AffineSymbol, WEIGHT_TAIL_TOL};
use crate::quaternion::{Quaternion, UnitImaginary};
use crate::slice_series::{QSeries, SeriesRecord};

pub const SCENARIOS: [&str; 7] = [
    "verify-kernel",
    "verify-star",
    "verify-exp-closed",
    "certify-operator",
    "certify-conjugation",
    "certify-symmetry",
    "weyl-group",
];

/// Complex number written as `[re, im]`.
pub type Pair = [f64; 2];

pub fn complex(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolConfig {
    pub a: Pair,
    pub b: Pair,
    /// Imaginary unit of the slice; `i` when absent.
    pub unit: Option<[f64; 3]>,
}

impl SymbolConfig {
    pub fn unit(&self) -> Result<UnitImaginary> {
        match self.unit {
            Some(u) => {
                UnitImaginary::try_from(u).map_err(|e| Error::Config(format!("symbol unit: {e}")))
            }
            None => Ok(UnitImaginary::I),
        }
    }

    pub fn build(&self) -> Result<AffineSymbol> {
        AffineSymbol::new(complex(self.a), complex(self.b), self.unit()?)
    }
}

/// A weight given inline, by file, or as `scale * e^{rate z}` on the symbol's slice.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    pub coefficients: Option<Vec<[f64; 4]>>,
    pub file: Option<PathBuf>,
    pub exponential: Option<Pair>,
    pub scale: Option<[f64; 4]>,
    pub degree: Option<usize>,
}

impl WeightConfig {
    pub fn build(&self, unit: UnitImaginary, base: &Path) -> Result<QSeries> {
        let given = [
            self.coefficients.is_some(),
            self.file.is_some(),
            self.exponential.is_some(),
        ]
        .iter()
        .filter(|x| **x)
        .count();
        if given != 1 {
            return Err(Error::Config(
                "weight needs exactly one of coefficients, file, exponential".into(),
            ));
        }
        let scale = Quaternion::from_array(self.scale.unwrap_or([1.0, 0.0, 0.0, 0.0]));
        let series = if let Some(c) = &self.coefficients {
            if c.is_empty() {
                return Err(Error::Config("weight coefficients are empty".into()));
            }
            QSeries::new(c.iter().map(|a| Quaternion::from_array(*a)).collect())
        } else if let Some(f) = &self.file {
            let path = if f.is_absolute() {
                f.clone()
            } else {
                base.join(f)
            };
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            let rec: SeriesRecord = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            QSeries::from_record(&rec)?
        } else {
            let r = complex(self.exponential.expect("counted above"));
            let degree = self
                .degree
                .unwrap_or_else(|| exp_truncation_degree(r.norm(), WEIGHT_TAIL_TOL));
            QSeries::exponential(unit.embed(r), degree)
        };
        Ok(series.mul_left(scale))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConjugationConfig {
    pub a: Pair,
    pub b: Pair,
    pub c: Pair,
    #[serde(default)]
    pub d: Pair,
}

impl Default for ConjugationConfig {
    fn default() -> Self {
        Self {
            a: [1.0, 0.0],
            b: [0.0, 0.0],
            c: [1.0, 0.0],
            d: [0.0, 0.0],
        }
    }
}

/// Symbol and constants of a complex symmetric instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymmetricConfig {
    pub a: Pair,
    pub b: Pair,
    pub c1: Pair,
    #[serde(default)]
    pub c2: Pair,
}

impl Default for SymmetricConfig {
    fn default() -> Self {
        Self {
            a: [0.5, 0.0],
            b: [0.3, 0.0],
            c1: [1.0, 0.0],
            c2: [0.0, 0.5],
        }
    }
}

/// Expected verdicts; unset ones are reported without affecting the exit code.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    pub bounded: Option<bool>,
    pub compact: Option<bool>,
    pub isometric: Option<bool>,
    pub commuting: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub scenario: String,
    pub truncation: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub points: Option<usize>,
    pub radius: Option<f64>,
    pub m_max: Option<usize>,
    pub quadrature: Option<QuadratureSpec>,
    pub grid: Option<SamplingSpec>,
    pub symbol: Option<SymbolConfig>,
    pub weight: Option<WeightConfig>,
    pub conjugation: Option<ConjugationConfig>,
    pub symmetric: Option<SymmetricConfig>,
    #[serde(default)]
    pub expect: Expectations,
    /// Directory that relative file references resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// Values given on the command line; each replaces the file value.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub truncation: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn with_scenario(mut self, scenario: &str, o: &Overrides) -> Result<Self> {
        if !SCENARIOS.contains(&scenario) {
            return Err(Error::Config(format!("unknown scenario '{scenario}'")));
        }
        self.scenario = scenario.to_string();
        if o.truncation.is_some() {
            self.truncation = o.truncation;
        }
        if o.tol.is_some() {
            self.tol = o.tol;
        }
        if o.seed.is_some() {
            self.seed = o.seed;
        }
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("tol must be positive, got {t}")));
            }
        }
        if let Some(r) = self.radius {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(Error::Config(format!(
                    "radius must be nonnegative, got {r}"
                )));
            }
        }
        if self.truncation == Some(0) {
            return Err(Error::Config("truncation must be positive".into()));
        }
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(7)
    }

    /// Tolerance of a check: the global override, else the check default.
    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_overrides() {
        let cfg = ScenarioConfig::parse(
            "truncation = 30\nseed = 3\n[symbol]\na = [0.5, 0.0]\nb = [0.0, 1.0]\n",
        )
        .unwrap();
        let o = Overrides {
            truncation: Some(50),
            ..Default::default()
        };
        let cfg = cfg.with_scenario("certify-operator", &o).unwrap();
        assert_eq!(cfg.truncation, Some(50));
        assert_eq!(cfg.seed(), 3);
        assert_eq!(
            cfg.symbol.unwrap().build().unwrap().b(),
            Complex64::new(0.0, 1.0)
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ScenarioConfig::parse("trunc = 3").is_err());
        let cfg = ScenarioConfig::default();
        assert!(cfg
            .clone()
            .with_scenario("nope", &Overrides::default())
            .is_err());
        let bad = Overrides {
            tol: Some(-1.0),
            ..Default::default()
        };
        assert!(cfg.with_scenario("verify-star", &bad).is_err());
        let w = WeightConfig::default();
        assert!(w.build(UnitImaginary::I, Path::new(".")).is_err());
    }

    #[test]
    fn exponential_weight_uses_tail_rule() {
        let w = WeightConfig {
            exponential: Some([1.0, 0.0]),
            ..Default::default()
        };
        let s = w.build(UnitImaginary::I, Path::new(".")).unwrap();
        assert_eq!(s.degree(), exp_truncation_degree(1.0, WEIGHT_TAIL_TOL));
    }
}
