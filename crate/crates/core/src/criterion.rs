//! Finite sufficient criterion for unique solvability.
//!
//! For bounds `0 < a ≤ b` and `n` arcs the probe points and directions are
//!
//! ```text
//! z_{j,k} = (a/2)·e_j' + (a + k·a/(4(n−1)))·e_j,     k = 2, …, K
//! d_j     = ((2b − a)/a)(n − 1)·e_j' − (1/2)·e_j
//! ```
//!
//! with `e_j' = 𝟙 − e_j`. If every `F'(z_{j,k}) d_j` has a positive eigenvalue, then
//! `λ = min_{j,k} λ_max(F'(z_{j,k}) d_j) > 0` and `F(γ)` determines `γ ∈ [a,b]ⁿ`
//! uniquely, with the noise bound `‖γ̂ − γ^δ‖_∞ ≤ 2δ(n−1)/λ`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{DiscreteForwardMap, Geometry};
use crate::symmat::{lambda_max, SymMatrix};

/// Eigenvalues at or below this count as "not positive".
pub const LAMBDA_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBounds")]
pub struct BoxBounds {
    a: f64,
    b: f64,
    n: usize,
}

#[derive(Deserialize)]
struct RawBounds {
    a: f64,
    b: f64,
    n: usize,
}

impl TryFrom<RawBounds> for BoxBounds {
    type Error = Error;

    fn try_from(r: RawBounds) -> Result<Self> {
        BoxBounds::new(r.a, r.b, r.n)
    }
}

impl BoxBounds {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::validation(format!(
                "lower bound a must be > 0, got {a}"
            )));
        }
        if !(b.is_finite() && b >= a) {
            return Err(Error::validation(format!(
                "upper bound b must be >= a = {a}, got {b}"
            )));
        }
        if n < 2 {
            return Err(Error::validation(format!("need n >= 2 unknowns, got {n}")));
        }
        Ok(Self { a, b, n })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.n && x.iter().all(|&v| v >= self.a && v <= self.b)
    }

    fn step(&self) -> f64 {
        self.a / (4.0 * (self.n - 1) as f64)
    }
}

/// Smallest `K ≥ 2` with `a + K·a/(4(n−1)) ≥ b + a/(4(n−1))`, which is what the
/// covering argument over `t ∈ [a + a/(2(n−1)), b + a/(2(n−1))]` needs.
pub fn compute_k(bounds: &BoxBounds) -> usize {
    let step = bounds.step();
    let holds = |k: usize| bounds.a + k as f64 * step >= bounds.b + step;
    let mut k = ((bounds.b - bounds.a) / step).ceil().max(0.0) as usize + 1;
    while k > 2 && holds(k - 1) {
        k -= 1;
    }
    while !holds(k) {
        k += 1;
    }
    k.max(2)
}

/// `⌈4(n−1)b/a⌉ − 4n − 3`. Reported next to [`compute_k`]; it is negative for small
/// `b/a` and is not used for the probe set.
pub fn closed_form_k(bounds: &BoxBounds) -> i64 {
    let n = bounds.n as i64;
    (4.0 * (n - 1) as f64 * bounds.b / bounds.a).ceil() as i64 - 4 * n - 3
}

pub fn probe_point(bounds: &BoxBounds, j: usize, k: usize) -> Vec<f64> {
    let mut z = vec![bounds.a / 2.0; bounds.n];
    z[j] = bounds.a + k as f64 * bounds.step();
    z
}

pub fn probe_direction(bounds: &BoxBounds, j: usize) -> Vec<f64> {
    let off = (2.0 * bounds.b - bounds.a) / bounds.a * (bounds.n - 1) as f64;
    let mut d = vec![off; bounds.n];
    d[j] = -0.5;
    d
}

/// `(n−1)·e_j' − e_j`
pub fn balanced_direction(n: usize, j: usize) -> Vec<f64> {
    let mut d = vec![(n - 1) as f64; n];
    d[j] = -1.0;
    d
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeEntry {
    /// Arc index `j`, 0-based.
    pub arc: usize,
    pub k: usize,
    pub point: Vec<f64>,
    /// `λ_max(F'(z_{j,k}) d_j)`, once evaluated.
    pub eigenvalue: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionData {
    pub bounds: BoxBounds,
    pub k: usize,
    pub k_closed_form: i64,
    pub directions: Vec<Vec<f64>>,
    pub entries: Vec<ProbeEntry>,
    pub lambda: Option<f64>,
    /// Number of measurements the eigenvalues were computed with.
    pub m: Option<usize>,
}

impl CriterionData {
    pub fn holds(&self) -> bool {
        self.lambda.is_some_and(|l| l > LAMBDA_FLOOR)
    }

    /// `2δ(n−1)/λ`, if the criterion holds.
    pub fn error_radius(&self, delta: f64) -> Option<f64> {
        self.holds()
            .then(|| 2.0 * delta * (self.bounds.n - 1) as f64 / self.lambda.unwrap())
    }

    fn with_eigenvalues(mut self, eigenvalues: &[f64], m: usize) -> Self {
        for (e, &ev) in self.entries.iter_mut().zip(eigenvalues) {
            e.eigenvalue = Some(ev);
        }
        self.lambda = eigenvalues.iter().copied().reduce(f64::min);
        self.m = Some(m);
        self
    }
}

/// Probe points and directions, eigenvalues unset.
pub fn build_points(bounds: &BoxBounds) -> CriterionData {
    let k = compute_k(bounds);
    let entries = (0..bounds.n)
        .flat_map(|j| {
            (2..=k).map(move |kk| ProbeEntry {
                arc: j,
                k: kk,
                point: probe_point(bounds, j, kk),
                eigenvalue: None,
            })
        })
        .collect();
    CriterionData {
        bounds: *bounds,
        k,
        k_closed_form: closed_form_k(bounds),
        directions: (0..bounds.n).map(|j| probe_direction(bounds, j)).collect(),
        entries,
        lambda: None,
        m: None,
    }
}

fn derivative_matrices(map: &DiscreteForwardMap, data: &CriterionData) -> Result<Vec<SymMatrix>> {
    if map.num_arcs() != data.bounds.n {
        return Err(Error::DimensionMismatch {
            left: map.num_arcs(),
            right: data.bounds.n,
        });
    }
    data.entries
        .par_iter()
        .map(|e| map.eval_f_prime(&e.point, &data.directions[e.arc]))
        .collect()
}

/// Fills every `λ_max(F'(z_{j,k}) d_j)`; the criterion holds iff `lambda > LAMBDA_FLOOR`.
pub fn evaluate_criterion(map: &DiscreteForwardMap, bounds: &BoxBounds) -> Result<CriterionData> {
    let data = build_points(bounds);
    let eigenvalues: Vec<f64> = derivative_matrices(map, &data)?
        .iter()
        .map(lambda_max)
        .collect();
    Ok(data.with_eigenvalues(&eigenvalues, map.num_currents()))
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepStep {
    pub m: usize,
    pub lambda: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepOutcome {
    /// Smallest sufficient `m`, or `None` if no `m ≤ m_max` works.
    pub sufficient_m: Option<usize>,
    /// Criterion data at `sufficient_m`, or at the best `m` seen otherwise.
    pub data: CriterionData,
    pub history: Vec<SweepStep>,
}

/// Sweeps `m = 1, 2, …, m_max` over one map assembled with `m_max` currents.
///
/// The currents are nested, so `F'(z)d` for `m` currents is the leading `m × m` block of
/// the `m_max` matrix and only the eigenvalue step is repeated. By interlacing, `λ` is
/// non-decreasing in `m`.
pub fn sweep_measurements(
    map: &DiscreteForwardMap,
    bounds: &BoxBounds,
    m_max: usize,
) -> Result<SweepOutcome> {
    if m_max == 0 {
        return Err(Error::validation("m_max must be >= 1"));
    }
    if m_max > map.num_currents() {
        return Err(Error::validation(format!(
            "m_max = {m_max} exceeds the {} assembled currents",
            map.num_currents()
        )));
    }
    let data = build_points(bounds);
    let full = derivative_matrices(map, &data)?;
    let mut history = Vec::with_capacity(m_max);
    let mut best: Option<(usize, Vec<f64>)> = None;
    for m in 1..=m_max {
        let eigenvalues = full
            .par_iter()
            .map(|f| f.leading(m).map(|b| lambda_max(&b)))
            .collect::<Result<Vec<f64>>>()?;
        let lambda = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        history.push(SweepStep { m, lambda });
        if best
            .as_ref()
            .is_none_or(|(bm, _)| lambda > history[bm - 1].lambda)
        {
            best = Some((m, eigenvalues.clone()));
        }
        if lambda > LAMBDA_FLOOR {
            return Ok(SweepOutcome {
                sufficient_m: Some(m),
                data: data.with_eigenvalues(&eigenvalues, m),
                history,
            });
        }
    }
    let (m, eigenvalues) = best.expect("m_max >= 1");
    Ok(SweepOutcome {
        sufficient_m: None,
        data: data.with_eigenvalues(&eigenvalues, m),
        history,
    })
}

/// Assembles with `m_max` currents and returns the smallest sufficient `m`.
///
/// Exhausting the sweep is an error carrying the best `λ` seen.
pub fn find_sufficient_m(
    geometry: &Geometry,
    bounds: &BoxBounds,
    mesh_size: f64,
    m_max: usize,
) -> Result<(usize, CriterionData)> {
    if m_max == 0 {
        return Err(Error::validation("m_max must be >= 1"));
    }
    if geometry.num_arcs() != bounds.n {
        return Err(Error::DimensionMismatch {
            left: geometry.num_arcs(),
            right: bounds.n,
        });
    }
    let map = DiscreteForwardMap::assemble(geometry, mesh_size, m_max)?;
    let outcome = sweep_measurements(&map, bounds, m_max)?;
    match outcome.sufficient_m {
        Some(m) => Ok((m, outcome.data)),
        None => Err(Error::CriterionNotMet {
            m_max,
            best_m: outcome.data.m.unwrap_or(0),
            best_lambda: outcome.data.lambda.unwrap_or(f64::NEG_INFINITY),
        }),
    }
}

/// Checks the implication
///
/// ```text
/// λ_max(F(y) − F(x)) < λ‖y − x‖_∞/(n−1)   ⟹   Σ_j (y_j − x_j) > 0
/// ```
///
/// for one pair. `y = x` passes vacuously.
pub fn converse_monotonicity_check(
    map: &DiscreteForwardMap,
    bounds: &BoxBounds,
    x: &[f64],
    y: &[f64],
    lambda: f64,
) -> Result<bool> {
    if !(lambda > 0.0) {
        return Err(Error::validation(format!(
            "lambda must be > 0, got {lambda}"
        )));
    }
    if !bounds.contains(x) || !bounds.contains(y) {
        return Err(Error::validation("x and y must lie in [a, b]^n"));
    }
    let dist = x
        .iter()
        .zip(y)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if dist == 0.0 {
        return Ok(true);
    }
    let gap = lambda_max(&map.eval_f(y)?.try_sub(&map.eval_f(x)?)?);
    let hypothesis = gap < lambda * dist / (bounds.n - 1) as f64;
    let sum: f64 = x.iter().zip(y).map(|(a, b)| b - a).sum();
    Ok(!hypothesis || sum > 0.0)
}

/// `λ_max(F'(x)((n−1)e_j' − e_j))`, bounded below by `λ` on `[a,b]ⁿ` when the
/// criterion holds.
pub fn balanced_eigenvalue(map: &DiscreteForwardMap, x: &[f64], j: usize) -> Result<f64> {
    Ok(lambda_max(
        &map.eval_f_prime(x, &balanced_direction(x.len(), j))?,
    ))
}
