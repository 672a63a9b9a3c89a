use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::criterion::BoxBounds;
use crate::error::{Error, Result};
use crate::fem::Geometry;
use crate::sdp::{SolverOptions, StrategyRegistry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GammaKeyword {
    Random,
}

/// Either explicit values or `"random"` (uniform in `[a,b]ⁿ`, seeded by `gamma_seed`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TrueGamma {
    Values(Vec<f64>),
    Keyword(GammaKeyword),
}

impl std::str::FromStr for TrueGamma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "random" {
            return Ok(TrueGamma::Keyword(GammaKeyword::Random));
        }
        s.split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::validation(format!("bad gamma entry '{v}': {e}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(TrueGamma::Values)
    }
}

/// Full experiment description. Every field has a default, and reports embed the
/// resolved value so a run can be repeated from its report alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub interface_radius: f64,
    pub segments_per_arc: usize,
    pub mesh_size: f64,
    /// Fixed number of measurements; `None` sweeps `1..=m_max`.
    pub m: Option<usize>,
    pub m_max: usize,
    pub true_gamma: TrueGamma,
    pub gamma_seed: u64,
    pub delta: f64,
    pub noise_seed: u64,
    /// Samples per property in `properties`.
    pub samples: usize,
    pub property_seed: u64,
    pub solver: String,
    pub solver_options: SolverOptions,
    /// Reconstruct even if the criterion fails.
    pub force: bool,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            a: 1.0,
            b: 2.0,
            n: 2,
            interface_radius: 0.5,
            segments_per_arc: 8,
            mesh_size: 0.05,
            m: None,
            m_max: 40,
            true_gamma: TrueGamma::Keyword(GammaKeyword::Random),
            gamma_seed: 1,
            delta: 0.0,
            noise_seed: 2,
            samples: 200,
            property_seed: 3,
            solver: "barrier".into(),
            solver_options: SolverOptions::default(),
            force: false,
            output_dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| Error::validation(format!("{}: {e}", path.display())))
    }

    pub fn bounds(&self) -> Result<BoxBounds> {
        BoxBounds::new(self.a, self.b, self.n)
    }

    pub fn geometry(&self) -> Result<Geometry> {
        Geometry::disk(self.n, self.interface_radius, self.segments_per_arc)
    }

    pub fn validate(&self) -> Result<()> {
        let bounds = self.bounds()?;
        self.geometry()?;
        if !(self.mesh_size.is_finite() && self.mesh_size > 0.0) {
            return Err(Error::validation(format!(
                "mesh_size must be > 0, got {}",
                self.mesh_size
            )));
        }
        if self.m_max == 0 {
            return Err(Error::validation("m_max must be >= 1"));
        }
        if self.m == Some(0) {
            return Err(Error::validation("m must be >= 1"));
        }
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(Error::validation(format!(
                "delta must be >= 0, got {}",
                self.delta
            )));
        }
        if let TrueGamma::Values(v) = &self.true_gamma {
            if !bounds.contains(v) {
                return Err(Error::validation(format!(
                    "true_gamma {v:?} must have {} entries in [{}, {}]",
                    bounds.n(),
                    bounds.a(),
                    bounds.b()
                )));
            }
        }
        self.solver_options.validate()?;
        StrategyRegistry::with_defaults().get(&self.solver)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = ExperimentConfig::default();
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains("\"true_gamma\":\"random\""));
        let back: ExperimentConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn partial_document_fills_defaults() {
        let c: ExperimentConfig =
            serde_json::from_str(r#"{"n": 3, "true_gamma": [1.0, 1.5, 2.0]}"#).unwrap();
        assert_eq!(c.n, 3);
        assert_eq!(c.true_gamma, TrueGamma::Values(vec![1.0, 1.5, 2.0]));
        assert_eq!(c.m_max, 40);
        c.validate().unwrap();
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"nn": 3}"#).is_err());
    }

    #[test]
    fn validation_failures() {
        let bad = [
            ExperimentConfig {
                m_max: 0,
                ..Default::default()
            },
            ExperimentConfig {
                true_gamma: TrueGamma::Values(vec![0.5, 1.5]),
                ..Default::default()
            },
            ExperimentConfig {
                true_gamma: TrueGamma::Values(vec![1.5]),
                ..Default::default()
            },
            ExperimentConfig {
                b: 0.5,
                ..Default::default()
            },
            ExperimentConfig {
                delta: -1.0,
                ..Default::default()
            },
            ExperimentConfig {
                solver: "simplex".into(),
                ..Default::default()
            },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn gamma_parsing() {
        assert_eq!(
            "random".parse::<TrueGamma>().unwrap(),
            TrueGamma::Keyword(GammaKeyword::Random)
        );
        assert_eq!(
            "1.5, 2".parse::<TrueGamma>().unwrap(),
            TrueGamma::Values(vec![1.5, 2.0])
        );
        assert!("1.5,x".parse::<TrueGamma>().is_err());
    }
}
