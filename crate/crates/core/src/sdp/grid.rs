use super::{ReconstructionResult, Reconstructor, SdpProblem, SolverOptions};
use crate::coefficient::CoefficientVector;
use crate::criterion::BoxBounds;
use crate::error::{Error, Result};
use crate::fem::DiscreteForwardMap;
use crate::symmat::{lambda_max, SymMatrix};

/// Exhaustive search over a uniform grid; for `n ≤ 3` only.
#[derive(Debug, Clone, Copy, Default)]
pub struct GridSearch;

impl Reconstructor for GridSearch {
    fn name(&self) -> &'static str {
        "grid"
    }

    fn solve(
        &self,
        problem: &SdpProblem<'_>,
        opts: &SolverOptions,
    ) -> Result<ReconstructionResult> {
        opts.validate()?;
        let best = brute_force_minimize(
            problem.forward,
            &problem.bounds,
            &problem.target,
            opts.grid_points,
            opts.feas_tol,
        )?;
        match best {
            Some(x) => {
                let evaluations = opts.grid_points.pow(problem.bounds.n() as u32);
                problem.result_at(x.into_inner(), evaluations, self.name())
            }
            None => {
                let top = vec![problem.bounds.b(); problem.bounds.n()];
                Err(Error::Infeasible {
                    violation: problem.violation(&top)?,
                })
            }
        }
    }
}

/// Grid point with the smallest `Σ x_j` among those with `λ_max(F(x) − target) ≤ feas_tol`.
///
/// Sums are compared on grid indices so ties are exact. Among tied points the one with
/// the most negative `λ_max(F(x) − target)` wins, then the first in lexicographic order.
pub fn brute_force_minimize(
    map: &DiscreteForwardMap,
    bounds: &BoxBounds,
    target: &SymMatrix,
    grid_points: usize,
    feas_tol: f64,
) -> Result<Option<CoefficientVector>> {
    let n = bounds.n();
    if n > 3 {
        return Err(Error::validation(format!(
            "grid search supports n <= 3, got {n}"
        )));
    }
    if grid_points < 2 {
        return Err(Error::validation("grid_points must be >= 2"));
    }
    let (a, b) = (bounds.a(), bounds.b());
    let axis: Vec<f64> = if a == b {
        vec![a]
    } else {
        (0..grid_points)
            .map(|i| a + (b - a) * i as f64 / (grid_points - 1) as f64)
            .collect()
    };
    let mut idx = vec![0usize; n];
    // (index sum, violation, point)
    let mut best: Option<(usize, f64, Vec<f64>)> = None;
    loop {
        let sum: usize = idx.iter().sum();
        if best.as_ref().is_none_or(|(s, _, _)| sum <= *s) {
            let x: Vec<f64> = idx.iter().map(|&i| axis[i]).collect();
            let violation = lambda_max(&map.eval_f(&x)?.try_sub(target)?);
            let better = best
                .as_ref()
                .is_none_or(|(s, v, _)| sum < *s || violation < *v);
            if violation <= feas_tol && better {
                best = Some((sum, violation, x));
            }
        }
        // odometer increment
        let mut d = n;
        loop {
            if d == 0 {
                return Ok(best.map(|(_, _, x)| CoefficientVector::new(x)));
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < axis.len() {
                break;
            }
            idx[d] = 0;
        }
    }
}
