//! Reconstruction by convex nonlinear semidefinite programming:
//!
//! ```text
//! minimize Σ_j x_j   subject to   x ∈ [a,b]ⁿ,   F(x) ⪯ Y
//! ```
//!
//! with `Y = Ŷ` for exact data and `Y = Y^δ + δI` for data with spectral-norm noise
//! `δ`. Solvers implement [`Reconstructor`] and are looked up by name in a
//! [`StrategyRegistry`].

mod barrier;
mod grid;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coefficient::CoefficientVector;
use crate::criterion::{BoxBounds, CriterionData};
use crate::error::{Error, Result};
use crate::fem::DiscreteForwardMap;
use crate::symmat::{lambda_max, SymMatrix};

pub use barrier::BarrierSolver;
pub use grid::{brute_force_minimize, GridSearch};

pub struct SdpProblem<'a> {
    pub forward: &'a DiscreteForwardMap,
    pub bounds: BoxBounds,
    pub target: SymMatrix,
    /// `δ` added to the data as `δI`; zero for exact data.
    pub slack_added: f64,
}

impl<'a> SdpProblem<'a> {
    pub fn exact(
        forward: &'a DiscreteForwardMap,
        bounds: BoxBounds,
        target: SymMatrix,
    ) -> Result<Self> {
        Self::noisy(forward, bounds, target, 0.0)
    }

    /// Target `Y^δ + δI`.
    pub fn noisy(
        forward: &'a DiscreteForwardMap,
        bounds: BoxBounds,
        data: SymMatrix,
        delta: f64,
    ) -> Result<Self> {
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::validation(format!(
                "delta must be >= 0, got {delta}"
            )));
        }
        if data.dim() != forward.num_currents() {
            return Err(Error::DimensionMismatch {
                left: data.dim(),
                right: forward.num_currents(),
            });
        }
        if bounds.n() != forward.num_arcs() {
            return Err(Error::DimensionMismatch {
                left: bounds.n(),
                right: forward.num_arcs(),
            });
        }
        let target = if delta > 0.0 { data.shift(delta) } else { data };
        Ok(Self {
            forward,
            bounds,
            target,
            slack_added: delta,
        })
    }

    /// `λ_max(F(x) − Y)`; feasible iff `≤ 0`.
    pub fn violation(&self, x: &[f64]) -> Result<f64> {
        Ok(lambda_max(&self.forward.eval_f(x)?.try_sub(&self.target)?))
    }

    pub(crate) fn result_at(
        &self,
        x: Vec<f64>,
        iterations: usize,
        strategy: &str,
    ) -> Result<ReconstructionResult> {
        let margin = -self.violation(&x)?;
        Ok(ReconstructionResult {
            objective: x.iter().sum(),
            minimizer: CoefficientVector::new(x),
            constraint_margin: margin,
            iterations,
            certified_error_radius: None,
            strategy: strategy.to_string(),
            path: Vec::new(),
            trace: Vec::new(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Objective accuracy; `None` means `1e-7 · n · b`.
    pub opt_tol: Option<f64>,
    pub feas_tol: f64,
    /// Cap on the total number of Newton steps.
    pub max_newton: usize,
    /// Barrier weight reduction per outer iteration.
    pub mu_factor: f64,
    pub mu_start: f64,
    /// Points per axis for the grid strategy.
    pub grid_points: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            opt_tol: None,
            feas_tol: 1e-9,
            max_newton: 500,
            mu_factor: 0.2,
            mu_start: 1.0,
            grid_points: 41,
        }
    }
}

impl SolverOptions {
    pub fn opt_tol_for(&self, bounds: &BoxBounds) -> f64 {
        self.opt_tol
            .unwrap_or(1e-7 * bounds.n() as f64 * bounds.b())
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.opt_tol {
            if !(t > 0.0) {
                return Err(Error::validation(format!("opt_tol must be > 0, got {t}")));
            }
        }
        if !(self.feas_tol >= 0.0) {
            return Err(Error::validation("feas_tol must be >= 0"));
        }
        if !(self.mu_factor > 0.0 && self.mu_factor < 1.0) {
            return Err(Error::validation(format!(
                "mu_factor must lie in (0, 1), got {}",
                self.mu_factor
            )));
        }
        if !(self.mu_start > 0.0) {
            return Err(Error::validation("mu_start must be > 0"));
        }
        if self.max_newton == 0 {
            return Err(Error::validation("max_newton must be >= 1"));
        }
        if self.grid_points < 2 {
            return Err(Error::validation("grid_points must be >= 2"));
        }
        Ok(())
    }
}

/// One Newton step of the barrier method.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub mu: f64,
    pub objective: f64,
    pub margin: f64,
}

/// End of one centering phase.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathPoint {
    pub mu: f64,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructionResult {
    pub minimizer: CoefficientVector,
    pub objective: f64,
    /// `−λ_max(F(x*) − Y)`; non-negative when feasible.
    pub constraint_margin: f64,
    pub iterations: usize,
    /// `2δ(n−1)/λ` when a criterion with `λ > 0` backs the result.
    pub certified_error_radius: Option<f64>,
    pub strategy: String,
    pub path: Vec<PathPoint>,
    #[serde(skip)]
    pub trace: Vec<TraceRow>,
}

impl ReconstructionResult {
    pub fn is_certified(&self) -> bool {
        self.certified_error_radius.is_some()
    }
}

/// A solver for [`SdpProblem`].
pub trait Reconstructor: Send + Sync {
    fn name(&self) -> &'static str;

    fn solve(&self, problem: &SdpProblem<'_>, opts: &SolverOptions)
        -> Result<ReconstructionResult>;
}

/// Name-keyed collection of reconstruction strategies.
#[derive(Clone, Default)]
pub struct StrategyRegistry {
    strategies: BTreeMap<&'static str, Arc<dyn Reconstructor>>,
}

impl StrategyRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// `barrier` and `grid`.
    pub fn with_defaults() -> Self {
        let mut r = Self::new();
        r.register(Arc::new(BarrierSolver));
        r.register(Arc::new(GridSearch));
        r
    }

    pub fn register(&mut self, strategy: Arc<dyn Reconstructor>) -> Option<Arc<dyn Reconstructor>> {
        self.strategies.insert(strategy.name(), strategy)
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Reconstructor>> {
        self.strategies.get(name).cloned().ok_or_else(|| {
            Error::validation(format!(
                "unknown solver '{name}' (available: {})",
                self.names().join(", ")
            ))
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.strategies.keys().copied().collect()
    }
}

/// Solves with the barrier method.
pub fn solve(problem: &SdpProblem<'_>, opts: &SolverOptions) -> Result<ReconstructionResult> {
    BarrierSolver.solve(problem, opts)
}

/// Solves the noisy program `F(x) ⪯ Y^δ + δI` and attaches `2δ(n−1)/λ`.
pub fn solve_noisy(
    map: &DiscreteForwardMap,
    bounds: BoxBounds,
    y_delta: SymMatrix,
    delta: f64,
    criterion: &CriterionData,
    opts: &SolverOptions,
) -> Result<ReconstructionResult> {
    solve_noisy_with(&BarrierSolver, map, bounds, y_delta, delta, criterion, opts)
}

pub fn solve_noisy_with(
    strategy: &dyn Reconstructor,
    map: &DiscreteForwardMap,
    bounds: BoxBounds,
    y_delta: SymMatrix,
    delta: f64,
    criterion: &CriterionData,
    opts: &SolverOptions,
) -> Result<ReconstructionResult> {
    let problem = SdpProblem::noisy(map, bounds, y_delta, delta)?;
    let mut result = strategy.solve(&problem, opts)?;
    result.certified_error_radius = criterion.error_radius(delta);
    Ok(result)
}
