//! Experiment runner behind the `robin-sdp` binary.
//!
//! Each subcommand reads an [`ExperimentConfig`], writes its outputs into
//! `output_dir`, and returns a report whose [`exit_code`](CriterionReport::exit_code)
//! follows the tool's contract: 0 success, 1 invalid input, 2 criterion not met,
//! 3 infeasible, 4 no convergence, 5 property violation.

mod config;
pub mod properties;

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

pub use config::{ExperimentConfig, GammaKeyword, TrueGamma};
pub use properties::{property_suite, PropertyOutcome};

use crate::coefficient::CoefficientVector;
use crate::criterion::{
    evaluate_criterion, sweep_measurements, CriterionData, SweepStep, LAMBDA_FLOOR,
};
use crate::error::{Error, Result};
use crate::fem::{DiscreteForwardMap, Mesh};
use crate::sdp::{solve_noisy_with, ReconstructionResult, StrategyRegistry};
use crate::symmat::{spectral_norm, SymMatrix};

pub const EXIT_PROPERTY_FAILURE: i32 = 5;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub config: ExperimentConfig,
    pub m: usize,
    pub k: usize,
    pub k_closed_form: i64,
    pub lambda: f64,
    pub lambda_floor: f64,
    pub passed: bool,
    pub criterion: CriterionData,
    pub sweep: Vec<SweepStep>,
}

impl CriterionReport {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            2
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionReport {
    pub config: ExperimentConfig,
    pub m: usize,
    pub lambda: f64,
    pub criterion_met: bool,
    pub true_gamma: CoefficientVector,
    pub noise_norm: f64,
    pub result: ReconstructionResult,
    pub error_inf: f64,
    pub within_certified_radius: Option<bool>,
}

impl ReconstructionReport {
    pub fn exit_code(&self) -> i32 {
        0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertyReport {
    pub config: ExperimentConfig,
    pub m: usize,
    pub lambda: f64,
    pub properties: Vec<PropertyOutcome>,
    pub all_passed: bool,
}

impl PropertyReport {
    pub fn exit_code(&self) -> i32 {
        if self.all_passed {
            0
        } else {
            EXIT_PROPERTY_FAILURE
        }
    }
}

/// Forward map at the chosen `m` with its criterion data.
struct Setup {
    map: DiscreteForwardMap,
    data: CriterionData,
    sweep: Vec<SweepStep>,
}

fn setup(config: &ExperimentConfig) -> Result<Setup> {
    config.validate()?;
    let geometry = config.geometry()?;
    let bounds = config.bounds()?;
    match config.m {
        Some(m) => {
            let map = DiscreteForwardMap::assemble(&geometry, config.mesh_size, m)?;
            let data = evaluate_criterion(&map, &bounds)?;
            Ok(Setup {
                map,
                data,
                sweep: Vec::new(),
            })
        }
        None => {
            let full = DiscreteForwardMap::assemble(&geometry, config.mesh_size, config.m_max)?;
            let outcome = sweep_measurements(&full, &bounds, config.m_max)?;
            let m = outcome.data.m.expect("sweep records m");
            Ok(Setup {
                map: full.truncated(m)?,
                data: outcome.data,
                sweep: outcome.history,
            })
        }
    }
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}

/// 17 significant digits.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Evaluates the criterion (fixed `m`) or sweeps `m = 1..=m_max`; writes `report.json`.
pub fn run_criterion(config: &ExperimentConfig) -> Result<CriterionReport> {
    let s = setup(config)?;
    let lambda = s.data.lambda.unwrap_or(f64::NEG_INFINITY);
    let report = CriterionReport {
        config: config.clone(),
        m: s.data.m.unwrap_or(0),
        k: s.data.k,
        k_closed_form: s.data.k_closed_form,
        lambda,
        lambda_floor: LAMBDA_FLOOR,
        passed: s.data.holds(),
        criterion: s.data,
        sweep: s.sweep,
    };
    write_json(&config.output_dir, "report.json", &report)?;
    Ok(report)
}

/// Symmetric Gaussian matrix `(G + Gᵀ)/2` rescaled to spectral norm `delta`.
pub fn noise_matrix(m: usize, delta: f64, seed: u64) -> Result<SymMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            g[(i, j)] = StandardNormal.sample(&mut rng);
        }
    }
    let e = SymMatrix::from_matrix(g)?;
    let norm = spectral_norm(&e);
    if norm == 0.0 {
        return Ok(SymMatrix::zeros(m));
    }
    Ok(e.scale(delta / norm))
}

pub fn true_gamma(config: &ExperimentConfig) -> Result<CoefficientVector> {
    let bounds = config.bounds()?;
    match &config.true_gamma {
        TrueGamma::Values(v) => Ok(CoefficientVector::new(v.clone())),
        TrueGamma::Keyword(GammaKeyword::Random) => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.gamma_seed);
            Ok(properties::uniform_in(&mut rng, &bounds).into())
        }
    }
}

/// Synthesizes data for `true_gamma`, perturbs it by noise of norm `delta`, and
/// reconstructs. Writes `report.json`, `reconstruction.csv` and `trace.csv`.
pub fn run_reconstruct(config: &ExperimentConfig) -> Result<ReconstructionReport> {
    let s = setup(config)?;
    let bounds = config.bounds()?;
    if !s.data.holds() && !config.force {
        return Err(Error::CriterionNotMet {
            m_max: config.m.unwrap_or(config.m_max),
            best_m: s.data.m.unwrap_or(0),
            best_lambda: s.data.lambda.unwrap_or(f64::NEG_INFINITY),
        });
    }
    let gamma = true_gamma(config)?;
    let m = s.map.num_currents();
    let exact = s.map.eval_f(&gamma)?;
    let noise = noise_matrix(m, config.delta, config.noise_seed)?;
    let data = if config.delta > 0.0 {
        exact.try_add(&noise)?
    } else {
        exact
    };

    let registry = StrategyRegistry::with_defaults();
    let strategy = registry.get(&config.solver)?;
    let result = solve_noisy_with(
        strategy.as_ref(),
        &s.map,
        bounds,
        data,
        config.delta,
        &s.data,
        &config.solver_options,
    )?;
    let error_inf = result.minimizer.max_abs_diff(&gamma);
    let report = ReconstructionReport {
        config: config.clone(),
        m,
        lambda: s.data.lambda.unwrap_or(f64::NEG_INFINITY),
        criterion_met: s.data.holds(),
        noise_norm: if config.delta > 0.0 {
            spectral_norm(&noise)
        } else {
            0.0
        },
        within_certified_radius: result.certified_error_radius.map(|r| error_inf <= r),
        true_gamma: gamma,
        error_inf,
        result,
    };

    let dir = &config.output_dir;
    write_json(dir, "report.json", &report)?;

    let mut csv = String::from("component,true,reconstructed,abs_error,certified_radius\n");
    let radius = report
        .result
        .certified_error_radius
        .map(num)
        .unwrap_or_default();
    for (j, (t, x)) in report
        .true_gamma
        .iter()
        .zip(report.result.minimizer.iter())
        .enumerate()
    {
        writeln!(
            csv,
            "{j},{},{},{},{radius}",
            num(*t),
            num(*x),
            num((x - t).abs())
        )
        .unwrap();
    }
    fs::write(dir.join("reconstruction.csv"), csv)?;

    let mut trace = String::from("iteration,mu,objective,margin\n");
    for row in &report.result.trace {
        writeln!(
            trace,
            "{},{},{},{}",
            row.iteration,
            num(row.mu),
            num(row.objective),
            num(row.margin)
        )
        .unwrap();
    }
    fs::write(dir.join("trace.csv"), trace)?;
    Ok(report)
}

/// Runs the sampled property suite; writes `report.json`.
pub fn run_properties(config: &ExperimentConfig) -> Result<PropertyReport> {
    let s = setup(config)?;
    let bounds = config.bounds()?;
    let lambda = s.data.lambda.filter(|_| s.data.holds());
    let props = property_suite(
        &s.map,
        &bounds,
        lambda,
        config.samples,
        config.property_seed,
    );
    let report = PropertyReport {
        config: config.clone(),
        m: s.map.num_currents(),
        lambda: s.data.lambda.unwrap_or(f64::NEG_INFINITY),
        all_passed: props.iter().all(PropertyOutcome::all_passed),
        properties: props,
    };
    write_json(&config.output_dir, "report.json", &report)?;
    Ok(report)
}

/// Writes the mesh listing to `mesh.txt`.
pub fn run_mesh_dump(config: &ExperimentConfig) -> Result<PathBuf> {
    config.validate()?;
    let mesh = Mesh::polar(&config.geometry()?, config.mesh_size)?;
    fs::create_dir_all(&config.output_dir)?;
    let path = config.output_dir.join("mesh.txt");
    let mut file = std::io::BufWriter::new(fs::File::create(&path)?);
    mesh.write_text(&mut file)?;
    file.flush()?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_has_exact_norm() {
        for (m, delta) in [(1, 0.5), (3, 1e-4), (7, 2.0)] {
            let e = noise_matrix(m, delta, 9).unwrap();
            assert!((spectral_norm(&e) - delta).abs() < 1e-14 * delta.max(1.0));
        }
    }

    #[test]
    fn noise_is_seeded() {
        assert_eq!(
            noise_matrix(4, 1.0, 5).unwrap(),
            noise_matrix(4, 1.0, 5).unwrap()
        );
        assert_ne!(
            noise_matrix(4, 1.0, 5).unwrap(),
            noise_matrix(4, 1.0, 6).unwrap()
        );
    }

    #[test]
    fn random_gamma_in_box() {
        let c = ExperimentConfig {
            n: 3,
            ..Default::default()
        };
        let g = true_gamma(&c).unwrap();
        assert!(c.bounds().unwrap().contains(&g));
        assert_eq!(g, true_gamma(&c).unwrap());
    }

    #[test]
    fn number_format_has_17_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
    }
}
