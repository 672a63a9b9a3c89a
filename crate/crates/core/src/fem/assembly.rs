//! P1 element matrices and the Neumann load vectors.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use nalgebra_sparse::{CooMatrix, CscMatrix};

use super::mesh::{signed_area, Mesh};

/// Boundary current `g_k(θ)` (1-based) of the L²(∂Ω)-orthonormal trigonometric family:
/// `g_1 = 1/√(2π)`, `g_{2ℓ} = cos(ℓθ)/√π`, `g_{2ℓ+1} = sin(ℓθ)/√π`.
pub fn boundary_function(k: usize, theta: f64) -> f64 {
    assert!(k >= 1, "boundary functions are numbered from 1");
    if k == 1 {
        return 1.0 / (2.0 * PI).sqrt();
    }
    let l = (k / 2) as f64;
    if k.is_multiple_of(2) {
        (l * theta).cos() / PI.sqrt()
    } else {
        (l * theta).sin() / PI.sqrt()
    }
}

// 5-point Gauss–Legendre on [0, 1], exact to degree 9.
const GAUSS_NODES: [f64; 5] = [
    0.046_910_077_030_668_004,
    0.230_765_344_947_158_45,
    0.5,
    0.769_234_655_052_841_6,
    0.953_089_922_969_332,
];
const GAUSS_WEIGHTS: [f64; 5] = [
    0.118_463_442_528_094_54,
    0.239_314_335_249_683_23,
    0.284_444_444_444_444_45,
    0.239_314_335_249_683_23,
    0.118_463_442_528_094_54,
];

/// `∫_Ω ∇u·∇v` over all triangles.
pub fn stiffness(mesh: &Mesh) -> CscMatrix<f64> {
    let n = mesh.num_vertices();
    let mut coo = CooMatrix::new(n, n);
    for tri in &mesh.triangles {
        let p = tri.map(|v| mesh.vertices[v]);
        let area = signed_area(p[0], p[1], p[2]);
        // ∇φ_i = (y_j − y_k, x_k − x_j) / (2·area) for (i, j, k) cyclic
        let grads: [[f64; 2]; 3] = std::array::from_fn(|i| {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            [
                (p[j][1] - p[k][1]) / (2.0 * area),
                (p[k][0] - p[j][0]) / (2.0 * area),
            ]
        });
        for a in 0..3 {
            for b in 0..3 {
                let v = area * (grads[a][0] * grads[b][0] + grads[a][1] * grads[b][1]);
                coo.push(tri[a], tri[b], v);
            }
        }
    }
    CscMatrix::from(&coo)
}

/// `∫_{Γ_j} u v ds`, one matrix per arc.
pub fn interface_mass(mesh: &Mesh, num_arcs: usize) -> Vec<CscMatrix<f64>> {
    let n = mesh.num_vertices();
    let mut coo: Vec<_> = (0..num_arcs).map(|_| CooMatrix::new(n, n)).collect();
    for e in &mesh.interface_edges {
        let [a, b] = e.nodes;
        let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
        let len = (pb[0] - pa[0]).hypot(pb[1] - pa[1]);
        let m = &mut coo[e.arc];
        m.push(a, a, len / 3.0);
        m.push(b, b, len / 3.0);
        m.push(a, b, len / 6.0);
        m.push(b, a, len / 6.0);
    }
    coo.iter().map(CscMatrix::from).collect()
}

/// `N × m` matrix whose column `k` holds `∫_{∂Ω} g_{k+1} φ_v ds`.
pub fn load_map(mesh: &Mesh, m: usize) -> DMatrix<f64> {
    let mut b = DMatrix::zeros(mesh.num_vertices(), m);
    for &[p, q] in &mesh.boundary_edges {
        let (xp, xq) = (mesh.vertices[p], mesh.vertices[q]);
        let len = (xq[0] - xp[0]).hypot(xq[1] - xp[1]);
        for (t, w) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
            let x = [xp[0] + t * (xq[0] - xp[0]), xp[1] + t * (xq[1] - xp[1])];
            let theta = x[1].atan2(x[0]);
            for k in 0..m {
                let g = boundary_function(k + 1, theta) * w * len;
                b[(p, k)] += g * (1.0 - t);
                b[(q, k)] += g * t;
            }
        }
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::Geometry;

    fn mesh() -> Mesh {
        Mesh::polar(&Geometry::disk(3, 0.5, 4).unwrap(), 0.1).unwrap()
    }

    #[test]
    fn boundary_functions_orthonormal() {
        // trapezoid rule is exact for trigonometric polynomials of low degree
        let n = 512;
        for j in 1..=7 {
            for k in 1..=7 {
                let s: f64 = (0..n)
                    .map(|i| {
                        let t = 2.0 * PI * i as f64 / n as f64;
                        boundary_function(j, t) * boundary_function(k, t)
                    })
                    .sum::<f64>()
                    * 2.0
                    * PI
                    / n as f64;
                let expected = if j == k { 1.0 } else { 0.0 };
                assert!((s - expected).abs() < 1e-12, "({j},{k}) -> {s}");
            }
        }
    }

    #[test]
    fn stiffness_annihilates_constants() {
        let m = mesh();
        let k = stiffness(&m);
        let ones = DMatrix::from_element(m.num_vertices(), 1, 1.0);
        let r = &k * &ones;
        assert!(r.amax() < 1e-12);
    }

    #[test]
    fn stiffness_reproduces_linear_energy() {
        // u = x has ∫|∇u|² = area of the mesh
        let m = mesh();
        let k = stiffness(&m);
        let u = DMatrix::from_fn(m.num_vertices(), 1, |i, _| m.vertices[i][0]);
        let energy = (u.transpose() * (&k * &u))[(0, 0)];
        let area: f64 = m
            .triangles
            .iter()
            .map(|t| signed_area(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]))
            .sum();
        assert!((energy - area).abs() < 1e-12);
    }

    #[test]
    fn interface_masses_sum_to_perimeter() {
        let m = mesh();
        let masses = interface_mass(&m, 3);
        assert_eq!(masses.len(), 3);
        let ones = DMatrix::from_element(m.num_vertices(), 1, 1.0);
        let mut total = 0.0;
        for mj in &masses {
            let len = (ones.transpose() * (mj * &ones))[(0, 0)];
            assert!(len > 0.0);
            total += len;
        }
        let perimeter: f64 = m
            .interface_edges
            .iter()
            .map(|e| {
                let (a, b) = (m.vertices[e.nodes[0]], m.vertices[e.nodes[1]]);
                (b[0] - a[0]).hypot(b[1] - a[1])
            })
            .sum();
        assert!((total - perimeter).abs() < 1e-13);
        assert!((perimeter - PI).abs() < 1e-2);
    }

    #[test]
    fn load_map_columns_nonzero() {
        let m = mesh();
        let b = load_map(&m, 5);
        assert_eq!(b.ncols(), 5);
        for k in 0..5 {
            assert!(b.column(k).norm() > 0.0);
        }
        // constant current: total flux is √(2π) · |∂Ω_h| / (2π)
        let flux: f64 = b.column(0).sum();
        assert!((flux - (2.0 * PI).sqrt()).abs() < 1e-2);
    }
}
