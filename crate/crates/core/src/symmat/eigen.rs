use nalgebra::DMatrix;

use super::SymMatrix;

/// Symmetric eigenvalue backend.
pub trait SymmetricEigensolver: Send + Sync {
    fn name(&self) -> &'static str;

    /// All eigenvalues in ascending order.
    fn eigenvalues(&self, a: &SymMatrix) -> Vec<f64>;
}

/// Householder tridiagonalization followed by implicit QR (nalgebra).
#[derive(Debug, Clone, Copy, Default)]
pub struct TridiagonalQr;

impl SymmetricEigensolver for TridiagonalQr {
    fn name(&self) -> &'static str {
        "tridiagonal-qr"
    }

    fn eigenvalues(&self, a: &SymMatrix) -> Vec<f64> {
        let mut ev: Vec<f64> = a
            .as_matrix()
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// Cyclic Jacobi rotations. Slower than QR but straightforward to audit; kept
/// as an independent check on the default backend.
#[derive(Debug, Clone, Copy)]
pub struct CyclicJacobi {
    pub max_sweeps: usize,
}

impl Default for CyclicJacobi {
    fn default() -> Self {
        Self { max_sweeps: 100 }
    }
}

impl SymmetricEigensolver for CyclicJacobi {
    fn name(&self) -> &'static str {
        "jacobi"
    }

    fn eigenvalues(&self, a: &SymMatrix) -> Vec<f64> {
        let mut m: DMatrix<f64> = a.as_matrix().clone();
        let n = m.nrows();
        let scale = m.norm();
        for _ in 0..self.max_sweeps {
            let mut off = 0.0;
            for q in 1..n {
                for p in 0..q {
                    off += m[(p, q)] * m[(p, q)];
                }
            }
            if off.sqrt() <= f64::EPSILON * 1e-2 * scale || off == 0.0 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = m[(p, q)];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let mkp = m[(k, p)];
                        let mkq = m[(k, q)];
                        m[(k, p)] = c * mkp - s * mkq;
                        m[(k, q)] = s * mkp + c * mkq;
                    }
                    for k in 0..n {
                        let mpk = m[(p, k)];
                        let mqk = m[(q, k)];
                        m[(p, k)] = c * mpk - s * mqk;
                        m[(q, k)] = s * mpk + c * mqk;
                    }
                }
            }
        }
        let mut ev: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

pub static EIGENSOLVERS: &[&str] = &["tridiagonal-qr", "jacobi"];

/// Looks up an eigensolver backend by name.
pub fn eigensolver(name: &str) -> Option<Box<dyn SymmetricEigensolver>> {
    match name {
        "tridiagonal-qr" => Some(Box::new(TridiagonalQr)),
        "jacobi" => Some(Box::new(CyclicJacobi::default())),
        _ => None,
    }
}
