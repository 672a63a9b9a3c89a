mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use robin_sdp::experiment::noise_matrix;
use robin_sdp::sdp::{
    brute_force_minimize, solve, solve_noisy, solve_noisy_with, BarrierSolver, SdpProblem,
    SolverOptions,
};
use robin_sdp::symmat::lambda_max;
use robin_sdp::{BoxBounds, StrategyRegistry};

fn draw(rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..2).map(|_| rng.gen_range(1.0..=2.0)).collect()
}

#[test]
fn exact_data_is_recovered() {
    let (map, _) = reference_setup();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..5 {
        let truth = draw(&mut rng);
        let problem =
            SdpProblem::exact(&map, reference_bounds(), map.eval_f(&truth).unwrap()).unwrap();
        let result = solve(&problem, &SolverOptions::default()).unwrap();
        assert!(
            result.minimizer.max_abs_diff(&truth) <= 1e-4,
            "{truth:?} -> {}",
            result.minimizer
        );
        assert!(result.constraint_margin >= -1e-9);
    }
}

#[test]
fn barrier_agrees_with_grid_oracle() {
    let (map, _) = reference_setup();
    let bounds = reference_bounds();
    let opts = SolverOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..3 {
        let truth = draw(&mut rng);
        let target = map.eval_f(&truth).unwrap();
        let problem = SdpProblem::exact(&map, bounds, target.clone()).unwrap();
        let barrier = solve(&problem, &opts).unwrap();
        let grid = brute_force_minimize(&map, &bounds, &target, 41, opts.feas_tol)
            .unwrap()
            .unwrap();
        assert!(
            barrier.minimizer.max_abs_diff(&grid) <= 1.0 / 40.0,
            "{} vs {grid}",
            barrier.minimizer
        );
    }
}

#[test]
fn minimizer_does_not_depend_on_start() {
    let (map, _) = reference_setup();
    let truth = [1.37, 1.62];
    let problem = SdpProblem::exact(&map, reference_bounds(), map.eval_f(&truth).unwrap()).unwrap();
    let opts = SolverOptions::default();
    let first = BarrierSolver.solve_from(&problem, &opts, None).unwrap();
    let second = BarrierSolver
        .solve_from(&problem, &opts, Some(&[1.95, 1.9]))
        .unwrap();
    assert!(first.minimizer.max_abs_diff(&second.minimizer) <= 1e-6);
}

#[test]
fn scaled_currents_give_the_same_minimizer() {
    let (map, _) = reference_setup();
    let truth = [1.21, 1.84];
    let opts = SolverOptions::default();
    let base = SdpProblem::exact(&map, reference_bounds(), map.eval_f(&truth).unwrap()).unwrap();
    let x0 = solve(&base, &opts).unwrap().minimizer;
    let scaled = map.scaled(3.0).unwrap();
    let problem =
        SdpProblem::exact(&scaled, reference_bounds(), scaled.eval_f(&truth).unwrap()).unwrap();
    let x1 = solve(&problem, &opts).unwrap().minimizer;
    assert!(x0.max_abs_diff(&x1) <= 1e-8, "{x0} vs {x1}");
}

#[test]
fn noisy_reconstructions_stay_within_certified_radius() {
    let (map, criterion) = reference_setup();
    let opts = SolverOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    for delta in [1e-5, 1e-4, 1e-3] {
        for _ in 0..20 {
            let truth = draw(&mut rng);
            let noise = noise_matrix(map.num_currents(), delta, rng.gen()).unwrap();
            let data = map.eval_f(&truth).unwrap().try_add(&noise).unwrap();

            // the truth itself is feasible for the widened constraint
            let widened = data.shift(delta);
            assert!(lambda_max(&map.eval_f(&truth).unwrap().try_sub(&widened).unwrap()) <= 1e-12);

            let result =
                solve_noisy(&map, reference_bounds(), data, delta, &criterion, &opts).unwrap();
            let radius = result.certified_error_radius.unwrap();
            assert!(result.minimizer.max_abs_diff(&truth) <= radius + 1e-6);
        }
    }
}

#[test]
fn zero_noise_reduces_to_exact_program() {
    let (map, criterion) = reference_setup();
    let truth = [1.55, 1.12];
    let data = map.eval_f(&truth).unwrap();
    let result = solve_noisy(
        &map,
        reference_bounds(),
        data,
        0.0,
        &criterion,
        &SolverOptions::default(),
    )
    .unwrap();
    assert_eq!(result.certified_error_radius, Some(0.0));
    assert!(result.minimizer.max_abs_diff(&truth) <= 1e-4);
}

#[test]
fn registry_strategies_agree() {
    let (map, criterion) = reference_setup();
    let registry = StrategyRegistry::with_defaults();
    assert_eq!(registry.names(), vec!["barrier", "grid"]);
    let truth = [1.5, 1.5];
    let data = map.eval_f(&truth).unwrap();
    let opts = SolverOptions::default();
    let mut answers = Vec::new();
    for name in registry.names() {
        let strategy = registry.get(name).unwrap();
        let result = solve_noisy_with(
            &*strategy,
            &map,
            reference_bounds(),
            data.clone(),
            0.0,
            &criterion,
            &opts,
        )
        .unwrap();
        assert_eq!(result.strategy, name);
        answers.push(result.minimizer);
    }
    assert!(answers[0].max_abs_diff(&answers[1]) <= 1.0 / 40.0);
    assert!(registry.get("simplex").is_err());
}

#[test]
fn target_below_reach_is_infeasible() {
    let (map, _) = reference_setup();
    let target = map.eval_f(&[2.0, 2.0]).unwrap().shift(-1e-3);
    let problem = SdpProblem::exact(&map, BoxBounds::new(1.0, 2.0, 2).unwrap(), target).unwrap();
    assert!(matches!(
        solve(&problem, &SolverOptions::default()),
        Err(robin_sdp::Error::Infeasible { .. })
    ));
}
