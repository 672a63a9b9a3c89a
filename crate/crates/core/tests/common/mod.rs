#![allow(dead_code)]

use nalgebra::{Matrix3, Vector3};
use robin_sdp::criterion::{sweep_measurements, BoxBounds, CriterionData};
use robin_sdp::fem::{DiscreteForwardMap, Geometry};

pub const MESH_SIZE: f64 = 0.05;

pub fn default_geometry(n: usize) -> Geometry {
    Geometry::disk(n, 0.5, 8).unwrap()
}

pub fn reference_bounds() -> BoxBounds {
    BoxBounds::new(1.0, 2.0, 2).unwrap()
}

/// n = 2, a = 1, b = 2 on the default disk, at the smallest sufficient m.
pub fn reference_setup() -> (DiscreteForwardMap, CriterionData) {
    let full = DiscreteForwardMap::assemble(&default_geometry(2), MESH_SIZE, 40).unwrap();
    let outcome = sweep_measurements(&full, &reference_bounds(), 40).unwrap();
    let m = outcome
        .sufficient_m
        .expect("criterion met on the reference problem");
    (full.truncated(m).unwrap(), outcome.data)
}

/// Neumann–Dirichlet eigenvalue of Fourier mode `l` on the unit disk with a concentric
/// interface of radius `r` and constant Robin coefficient `c`.
///
/// For `l ≥ 1`, `u = α ρ^l` inside and `u = β ρ^l + η ρ^{−l}` in the annulus (times the
/// angular factor), with continuity and the jump `∂_ρu⁺ − ∂_ρu⁻ = c·u` at `ρ = r` and unit
/// flux `∂_ρu = 1` at `ρ = 1`. The eigenvalue is the trace `u(1) = β + η`. For `l = 0` the
/// annulus solution is `β + η log ρ`.
pub fn fourier_eigenvalue(l: usize, c: f64, r: f64) -> f64 {
    if l == 0 {
        // unknowns (α, β, η); g = 1 means ∂_ρu(1) = η = 1 and F = ∫g·u / ∫g² = β
        let a = Matrix3::new(
            1.0,
            -1.0,
            -r.ln(), //
            -c,
            0.0,
            1.0 / r, //
            0.0,
            0.0,
            1.0,
        );
        let x = a.lu().solve(&Vector3::new(0.0, 0.0, 1.0)).unwrap();
        return x[1];
    }
    let lf = l as f64;
    let a = Matrix3::new(
        r.powf(lf),
        -r.powf(lf),
        -r.powf(-lf),
        -lf * r.powf(lf - 1.0) - c * r.powf(lf),
        lf * r.powf(lf - 1.0),
        -lf * r.powf(-lf - 1.0),
        0.0,
        lf,
        -lf,
    );
    let x = a.lu().solve(&Vector3::new(0.0, 0.0, 1.0)).unwrap();
    x[1] + x[2]
}

/// Analytic `F` for the first `m` currents: diagonal, entry `k` (1-based) carries mode `⌊k/2⌋`.
pub fn analytic_measurements(m: usize, c: f64, r: f64) -> Vec<f64> {
    (1..=m).map(|k| fourier_eigenvalue(k / 2, c, r)).collect()
}

/// Relative Frobenius distance between `F(c𝟙)` and the analytic diagonal.
pub fn oracle_relative_error(map: &DiscreteForwardMap, c: f64, r: f64) -> f64 {
    let m = map.num_currents();
    let f = map.eval_f(&vec![c; map.num_arcs()]).unwrap();
    let exact = analytic_measurements(m, c, r);
    let (mut num, mut den) = (0.0, 0.0);
    for (i, &diag) in exact.iter().enumerate() {
        for j in 0..m {
            let e = if i == j { diag } else { 0.0 };
            num += (f.get(i, j) - e).powi(2);
            den += e * e;
        }
    }
    (num / den).sqrt()
}
