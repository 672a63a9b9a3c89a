//! Sampled checks of the structural properties of `F` on `[a,b]ⁿ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coefficient::CoefficientVector;
use crate::criterion::{balanced_eigenvalue, converse_monotonicity_check, BoxBounds};
use crate::error::Result;
use crate::fem::DiscreteForwardMap;
use crate::symmat::{lambda_max, loewner_leq, spectral_norm};

pub const LOEWNER_SLACK: f64 = 1e-10;
pub const LEMMA_SLACK: f64 = 1e-9;
const CONVEX_WEIGHTS: [f64; 3] = [0.25, 0.5, 0.75];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyOutcome {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
    pub skipped: bool,
    pub first_failure: Option<String>,
}

impl PropertyOutcome {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            passed: 0,
            failed: 0,
            skipped: false,
            first_failure: None,
        }
    }

    fn skipped(name: &str) -> Self {
        Self {
            skipped: true,
            ..Self::new(name)
        }
    }

    fn record(&mut self, sample: usize, check: Result<(bool, String)>) {
        let (ok, detail) = match check {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(format!("sample {sample}: {detail}"));
            }
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

pub(crate) fn uniform_in(rng: &mut ChaCha8Rng, bounds: &BoxBounds) -> Vec<f64> {
    (0..bounds.n())
        .map(|_| bounds.a() + (bounds.b() - bounds.a()) * rng.gen::<f64>())
        .collect()
}

fn fmt(v: &[f64]) -> String {
    CoefficientVector::new(v.to_vec()).to_string()
}

/// `γ¹ ≤ γ²` entrywise implies `F(γ²) ⪯ F(γ¹)`.
pub fn check_monotone(map: &DiscreteForwardMap, g1: &[f64], g2: &[f64]) -> Result<(bool, String)> {
    let (f1, f2) = (map.eval_f(g1)?, map.eval_f(g2)?);
    let gap = lambda_max(&f2.try_sub(&f1)?);
    Ok((
        loewner_leq(&f2, &f1, LOEWNER_SLACK)?,
        format!(
            "g1={} g2={} lambda_max(F(g2)-F(g1))={gap:e}",
            fmt(g1),
            fmt(g2)
        ),
    ))
}

/// `F((1−t)γ⁰ + tγ¹) ⪯ (1−t)F(γ⁰) + tF(γ¹)`.
pub fn check_convex_combination(
    map: &DiscreteForwardMap,
    g0: &[f64],
    g1: &[f64],
    t: f64,
) -> Result<(bool, String)> {
    let mix: Vec<f64> = g0
        .iter()
        .zip(g1)
        .map(|(a, b)| (1.0 - t) * a + t * b)
        .collect();
    let lhs = map.eval_f(&mix)?;
    let rhs = map
        .eval_f(g0)?
        .scale(1.0 - t)
        .try_add(&map.eval_f(g1)?.scale(t))?;
    let gap = lambda_max(&lhs.try_sub(&rhs)?);
    Ok((
        loewner_leq(&lhs, &rhs, LOEWNER_SLACK)?,
        format!("g0={} g1={} t={t} gap={gap:e}", fmt(g0), fmt(g1)),
    ))
}

/// `F'(γ⁰)(γ − γ⁰) ⪯ F(γ) − F(γ⁰)`.
pub fn check_tangent(map: &DiscreteForwardMap, g0: &[f64], g: &[f64]) -> Result<(bool, String)> {
    let d: Vec<f64> = g.iter().zip(g0).map(|(a, b)| a - b).collect();
    let lhs = map.eval_f_prime(g0, &d)?;
    let rhs = map.eval_f(g)?.try_sub(&map.eval_f(g0)?)?;
    let gap = lambda_max(&lhs.try_sub(&rhs)?);
    Ok((
        loewner_leq(&lhs, &rhs, LOEWNER_SLACK)?,
        format!("g0={} g={} gap={gap:e}", fmt(g0), fmt(g)),
    ))
}

/// `‖(F(γ + hd) − F(γ))/h − F'(γ)d‖₂` for each step.
pub fn finite_difference_errors(
    map: &DiscreteForwardMap,
    g: &[f64],
    d: &[f64],
    steps: &[f64],
) -> Result<Vec<f64>> {
    let f0 = map.eval_f(g)?;
    let exact = map.eval_f_prime(g, d)?;
    steps
        .iter()
        .map(|&h| {
            let shifted: Vec<f64> = g.iter().zip(d).map(|(a, b)| a + h * b).collect();
            let fd = map.eval_f(&shifted)?.try_sub(&f0)?.scale(1.0 / h);
            Ok(spectral_norm(&fd.try_sub(&exact)?))
        })
        .collect()
}

/// Observed orders `log(e_i/e_{i+1}) / log(h_i/h_{i+1})` between consecutive steps.
pub fn observed_orders(errors: &[f64], steps: &[f64]) -> Vec<f64> {
    errors
        .windows(2)
        .zip(steps.windows(2))
        .map(|(e, h)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect()
}

pub fn check_derivative(map: &DiscreteForwardMap, g: &[f64], d: &[f64]) -> Result<(bool, String)> {
    let steps = [1e-3, 1e-4];
    let errors = finite_difference_errors(map, g, d, &steps)?;
    let order = observed_orders(&errors, &steps)[0];
    Ok((
        (0.8..=1.2).contains(&order),
        format!("g={} d={} errors={errors:?} order={order}", fmt(g), fmt(d)),
    ))
}

/// Runs every property `samples` times with a seeded generator.
///
/// The converse-monotonicity and lower-bound properties need `lambda > 0` and are
/// marked skipped otherwise.
pub fn property_suite(
    map: &DiscreteForwardMap,
    bounds: &BoxBounds,
    lambda: Option<f64>,
    samples: usize,
    seed: u64,
) -> Vec<PropertyOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = bounds.n();
    let b = bounds.b();

    let mut monotone = PropertyOutcome::new("monotonicity");
    let mut convex = PropertyOutcome::new("convex_combination");
    let mut tangent = PropertyOutcome::new("tangent_inequality");
    let mut derivative = PropertyOutcome::new("derivative_finite_difference");
    for s in 0..samples {
        let g1 = uniform_in(&mut rng, bounds);
        let g2: Vec<f64> = g1.iter().map(|&v| v + (b - v) * rng.gen::<f64>()).collect();
        monotone.record(s, check_monotone(map, &g1, &g2));

        let g0 = uniform_in(&mut rng, bounds);
        let g = uniform_in(&mut rng, bounds);
        convex.record(
            s,
            check_convex_combination(map, &g0, &g, CONVEX_WEIGHTS[s % 3]),
        );
        tangent.record(s, check_tangent(map, &g0, &g));

        let d: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        derivative.record(s, check_derivative(map, &g0, &d));
    }

    let mut out = vec![monotone, convex, tangent, derivative];
    match lambda.filter(|&l| l > 0.0) {
        Some(lambda) => {
            let mut converse = PropertyOutcome::new("converse_monotonicity");
            let mut lower = PropertyOutcome::new("balanced_direction_lower_bound");
            for s in 0..samples {
                let x = uniform_in(&mut rng, bounds);
                let y = uniform_in(&mut rng, bounds);
                converse.record(
                    s,
                    converse_monotonicity_check(map, bounds, &x, &y, lambda)
                        .map(|ok| (ok, format!("x={} y={} lambda={lambda:e}", fmt(&x), fmt(&y)))),
                );
                let check = (0..n)
                    .map(|j| balanced_eigenvalue(map, &x, j))
                    .collect::<Result<Vec<f64>>>()
                    .map(|ev| {
                        let ok = ev.iter().all(|&e| e >= lambda - LEMMA_SLACK);
                        (
                            ok,
                            format!("x={} eigenvalues={ev:?} lambda={lambda:e}", fmt(&x)),
                        )
                    });
                lower.record(s, check);
            }
            out.push(converse);
            out.push(lower);
        }
        None => {
            out.push(PropertyOutcome::skipped("converse_monotonicity"));
            out.push(PropertyOutcome::skipped("balanced_direction_lower_bound"));
        }
    }
    out
}
