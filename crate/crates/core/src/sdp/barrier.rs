//! Logarithmic-barrier path following.
//!
//! For a barrier weight `μ > 0` the merit function is
//!
//! ```text
//! φ_μ(x) = Σ_j x_j − μ [ log det(Y − F(x)) + Σ_j log(x_j − a) + Σ_j log(b − x_j) ]
//! ```
//!
//! which is convex because `F` is matrix-convex and `log det` is concave and
//! matrix-monotone. Each outer step minimizes `φ_μ` by damped Newton and then shrinks
//! `μ`. On the central path the objective exceeds the optimum by at most `μ(m + 2n)`,
//! which gives the stopping rule.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::{PathPoint, ReconstructionResult, Reconstructor, SdpProblem, SolverOptions, TraceRow};
use crate::error::{Error, Result};
use crate::symmat::lambda_min;
use crate::symmat::SymMatrix;

const CENTERING_TOL: f64 = 1e-14;
const ARMIJO: f64 = 0.25;
const MAX_BACKTRACK: usize = 60;
const INITIAL_SHIFT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, Default)]
pub struct BarrierSolver;

impl Reconstructor for BarrierSolver {
    fn name(&self) -> &'static str {
        "barrier"
    }

    fn solve(
        &self,
        problem: &SdpProblem<'_>,
        opts: &SolverOptions,
    ) -> Result<ReconstructionResult> {
        self.solve_from(problem, opts, None)
    }
}

/// `Y − F(x)` factored, or `None` outside the open feasible set.
fn slack_factor(problem: &SdpProblem<'_>, f: &SymMatrix) -> Option<Cholesky<f64, Dyn>> {
    let g = problem.target.as_matrix() - f.as_matrix();
    Cholesky::new(g)
}

fn log_det(chol: &Cholesky<f64, Dyn>) -> f64 {
    2.0 * chol
        .l_dirty()
        .diagonal()
        .iter()
        .map(|d| d.ln())
        .sum::<f64>()
}

fn inside_box(x: &[f64], a: f64, b: f64) -> bool {
    x.iter().all(|&v| v > a && v < b)
}

fn merit(problem: &SdpProblem<'_>, x: &[f64], mu: f64) -> Result<Option<f64>> {
    let (a, b) = (problem.bounds.a(), problem.bounds.b());
    if !inside_box(x, a, b) {
        return Ok(None);
    }
    let f = problem.forward.eval_f(x)?;
    let Some(chol) = slack_factor(problem, &f) else {
        return Ok(None);
    };
    let box_terms: f64 = x.iter().map(|&v| (v - a).ln() + (b - v).ln()).sum();
    Ok(Some(
        x.iter().sum::<f64>() - mu * (log_det(&chol) + box_terms),
    ))
}

struct NewtonSystem {
    value: f64,
    gradient: DVector<f64>,
    hessian: DMatrix<f64>,
    margin: f64,
}

fn newton_system(problem: &SdpProblem<'_>, x: &[f64], mu: f64) -> Result<NewtonSystem> {
    let (a, b) = (problem.bounds.a(), problem.bounds.b());
    let n = x.len();
    let lin = problem.forward.linearize(x, true)?;
    let chol = slack_factor(problem, &lin.value)
        .ok_or_else(|| Error::Solver("Newton iterate left the feasible set".into()))?;
    let slack_inv = chol.inverse();
    let margin = lambda_min(&SymMatrix::from_matrix(
        problem.target.as_matrix() - lin.value.as_matrix(),
    )?);
    // G⁻¹ ∂_jF
    let weighted: Vec<DMatrix<f64>> = lin
        .partials
        .iter()
        .map(|p| &slack_inv * p.as_matrix())
        .collect();
    let second = lin.second.expect("second-order linearization");

    let mut gradient = DVector::zeros(n);
    let mut hessian = DMatrix::zeros(n, n);
    for i in 0..n {
        let (lo, hi) = (x[i] - a, b - x[i]);
        gradient[i] = 1.0 + mu * weighted[i].trace() - mu / lo + mu / hi;
        for j in 0..=i {
            let cross = weighted[i].component_mul(&weighted[j].transpose()).sum();
            let curvature = slack_inv.component_mul(second[i * n + j].as_matrix()).sum();
            let mut h = mu * (cross + curvature);
            if i == j {
                h += mu * (1.0 / (lo * lo) + 1.0 / (hi * hi));
            }
            hessian[(i, j)] = h;
            hessian[(j, i)] = h;
        }
    }
    let box_terms: f64 = x.iter().map(|&v| (v - a).ln() + (b - v).ln()).sum();
    let value = x.iter().sum::<f64>() - mu * (log_det(&chol) + box_terms);
    Ok(NewtonSystem {
        value,
        gradient,
        hessian,
        margin,
    })
}

fn newton_direction(sys: &NewtonSystem) -> Result<DVector<f64>> {
    let n = sys.gradient.len();
    let scale = sys.hessian.diagonal().amax().max(1.0);
    let mut reg = 0.0;
    for _ in 0..20 {
        let h = &sys.hessian + DMatrix::identity(n, n) * reg;
        if let Some(chol) = Cholesky::new(h) {
            return Ok(-chol.solve(&sys.gradient));
        }
        reg = if reg == 0.0 {
            1e-14 * scale
        } else {
            reg * 100.0
        };
    }
    Err(Error::Solver(
        "barrier Hessian is not positive definite".into(),
    ))
}

impl BarrierSolver {
    /// Path following from a given strictly feasible start, or from the default
    /// `b𝟙` shifted inward when `start` is `None`.
    pub fn solve_from(
        &self,
        problem: &SdpProblem<'_>,
        opts: &SolverOptions,
        start: Option<&[f64]>,
    ) -> Result<ReconstructionResult> {
        opts.validate()?;
        let bounds = problem.bounds;
        let (a, b, n) = (bounds.a(), bounds.b(), bounds.n());
        let m = problem.target.dim();

        if a == b {
            let x = vec![a; n];
            let violation = problem.violation(&x)?;
            if violation > opts.feas_tol {
                return Err(Error::Infeasible { violation });
            }
            return problem.result_at(x, 0, self.name());
        }

        let top = vec![b; n];
        let violation = problem.violation(&top)?;
        if violation > opts.feas_tol {
            return Err(Error::Infeasible { violation });
        }

        let mut x = match start {
            Some(s) => {
                if s.len() != n {
                    return Err(Error::DimensionMismatch {
                        left: s.len(),
                        right: n,
                    });
                }
                if !inside_box(s, a, b) || problem.violation(s)? >= 0.0 {
                    return Err(Error::validation("start point is not strictly feasible"));
                }
                s.to_vec()
            }
            None => {
                if violation >= 0.0 {
                    // b𝟙 is feasible only up to tolerance and dominates every other point
                    return problem.result_at(top, 0, self.name());
                }
                match self.interior_start(problem, b - a)? {
                    Some(x) => x,
                    None => return problem.result_at(top, 0, self.name()),
                }
            }
        };

        let opt_tol = opts.opt_tol_for(&bounds);
        let nu = (m + 2 * n) as f64;
        let mut mu = opts.mu_start;
        let mut iterations = 0;
        let mut trace = Vec::new();
        let mut path = Vec::new();

        loop {
            loop {
                let sys = newton_system(problem, &x, mu)?;
                trace.push(TraceRow {
                    iteration: iterations,
                    mu,
                    objective: x.iter().sum(),
                    margin: sys.margin,
                });
                let dx = newton_direction(&sys)?;
                let decrement = -sys.gradient.dot(&dx);
                if decrement / 2.0 <= CENTERING_TOL {
                    break;
                }
                if iterations >= opts.max_newton {
                    return Err(Error::NonConvergence {
                        iterations,
                        objective: x.iter().sum(),
                        best: x,
                    });
                }
                iterations += 1;
                let mut t = 1.0;
                let mut accepted = false;
                for _ in 0..MAX_BACKTRACK {
                    let trial: Vec<f64> = x.iter().zip(dx.iter()).map(|(v, d)| v + t * d).collect();
                    if trial == x {
                        break;
                    }
                    if let Some(phi) = merit(problem, &trial, mu)? {
                        if phi <= sys.value - ARMIJO * t * decrement {
                            x = trial;
                            accepted = true;
                            break;
                        }
                    }
                    t *= 0.5;
                }
                if !accepted {
                    // no representable decrease left at this μ
                    break;
                }
            }
            path.push(PathPoint {
                mu,
                objective: x.iter().sum(),
            });
            if mu * nu < opt_tol {
                break;
            }
            mu *= opts.mu_factor;
        }

        let mut result = problem.result_at(x, iterations, self.name())?;
        result.path = path;
        result.trace = trace;
        Ok(result)
    }

    fn interior_start(&self, problem: &SdpProblem<'_>, width: f64) -> Result<Option<Vec<f64>>> {
        let (b, n) = (problem.bounds.b(), problem.bounds.n());
        let mut shift = INITIAL_SHIFT * width;
        for _ in 0..60 {
            let x = vec![b - shift; n];
            if problem.violation(&x)? < 0.0 {
                return Ok(Some(x));
            }
            shift *= 0.5;
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criterion::BoxBounds;
    use crate::fem::{DiscreteForwardMap, Geometry};

    fn map(m: usize) -> DiscreteForwardMap {
        DiscreteForwardMap::assemble(&Geometry::disk(2, 0.5, 8).unwrap(), 0.1, m).unwrap()
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let f = map(4);
        let bounds = BoxBounds::new(1.0, 2.0, 2).unwrap();
        let target = f.eval_f(&[1.3, 1.4]).unwrap();
        let p = SdpProblem::exact(&f, bounds, target).unwrap();
        let x = [1.7, 1.8];
        let mu = 0.3;
        let sys = newton_system(&p, &x, mu).unwrap();
        let h = 1e-6;
        for i in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            let gp = merit(&p, &xp, mu).unwrap().unwrap();
            let gm = merit(&p, &xm, mu).unwrap().unwrap();
            let fd = (gp - gm) / (2.0 * h);
            assert!(
                (fd - sys.gradient[i]).abs() < 1e-6 * (1.0 + fd.abs()),
                "{fd} vs {}",
                sys.gradient[i]
            );
            let sp = newton_system(&p, &xp, mu).unwrap();
            let sm = newton_system(&p, &xm, mu).unwrap();
            for j in 0..2 {
                let fd = (sp.gradient[j] - sm.gradient[j]) / (2.0 * h);
                let an = sys.hessian[(i, j)];
                assert!(
                    (fd - an).abs() < 1e-5 * (1.0 + an.abs()),
                    "H[{i}{j}] {fd} vs {an}"
                );
            }
        }
    }

    #[test]
    fn exact_data_round_trip() {
        let f = map(5);
        let bounds = BoxBounds::new(1.0, 2.0, 2).unwrap();
        let truth = [1.27, 1.62];
        let p = SdpProblem::exact(&f, bounds, f.eval_f(&truth).unwrap()).unwrap();
        let r = BarrierSolver.solve(&p, &SolverOptions::default()).unwrap();
        assert!(r.minimizer.max_abs_diff(&truth) < 1e-4, "{}", r.minimizer);
        assert!(r.constraint_margin >= -1e-9);
        for w in r.path.windows(2) {
            assert!(w[1].objective <= w[0].objective + 1e-12);
        }
    }

    #[test]
    fn degenerate_box() {
        let f = map(3);
        let bounds = BoxBounds::new(1.5, 1.5, 2).unwrap();
        let p = SdpProblem::exact(&f, bounds, f.eval_f(&[1.5, 1.5]).unwrap()).unwrap();
        let r = BarrierSolver.solve(&p, &SolverOptions::default()).unwrap();
        assert_eq!(r.minimizer.as_slice(), &[1.5, 1.5]);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn unattainable_target_is_infeasible() {
        let f = map(3);
        let bounds = BoxBounds::new(1.0, 2.0, 2).unwrap();
        let target = f.eval_f(&[1.0, 1.0]).unwrap().shift(-1.0);
        let p = SdpProblem::exact(&f, bounds, target).unwrap();
        let err = BarrierSolver
            .solve(&p, &SolverOptions::default())
            .unwrap_err();
        assert!(matches!(err, Error::Infeasible { .. }), "{err}");
    }

    #[test]
    fn newton_cap_reports_best_iterate() {
        let f = map(3);
        let bounds = BoxBounds::new(1.0, 2.0, 2).unwrap();
        let p = SdpProblem::exact(&f, bounds, f.eval_f(&[1.2, 1.3]).unwrap()).unwrap();
        let opts = SolverOptions {
            max_newton: 2,
            ..Default::default()
        };
        match BarrierSolver.solve(&p, &opts) {
            Err(Error::NonConvergence { best, .. }) => assert_eq!(best.len(), 2),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn rejects_infeasible_start() {
        let f = map(3);
        let bounds = BoxBounds::new(1.0, 2.0, 2).unwrap();
        let p = SdpProblem::exact(&f, bounds, f.eval_f(&[1.5, 1.5]).unwrap()).unwrap();
        let opts = SolverOptions::default();
        assert!(BarrierSolver
            .solve_from(&p, &opts, Some(&[1.1, 1.1]))
            .is_err());
        assert!(BarrierSolver
            .solve_from(&p, &opts, Some(&[2.0, 1.9]))
            .is_err());
    }
}
