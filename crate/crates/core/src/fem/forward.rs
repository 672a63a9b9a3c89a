use nalgebra::{Cholesky, DMatrix, Dyn};
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix};

use super::{assembly, Geometry, Mesh};
use crate::coefficient::CoefficientVector;
use crate::error::{Error, Result};
use crate::symmat::SymMatrix;

/// Sparse triplets of an interface mass matrix in interface-local numbering.
type Triplets = Vec<(usize, usize, f64)>;

/// Assembled Galerkin operators for the Robin transmission problem.
///
/// With `A(γ) = K₀ + Σ_j γ_j M_j` the measurement matrix is `F(γ) = Bᵀ A(γ)⁻¹ B`.
/// `M_j` only touches the interface vertices and `B` only the outer boundary, so the
/// remaining vertices are eliminated once at assembly. Every evaluation then reduces to
/// a dense solve on the interface:
///
/// ```text
/// F(γ) = F₀ + Cᵀ (S + Σ_j γ_j M_j^Γ)⁻¹ C
/// ```
///
/// where `S` is the Schur complement of `K₀` onto the interface vertices, and `F₀`, `C`
/// come from the solve with `K₀` restricted to the non-interface vertices.
#[derive(Debug, Clone)]
pub struct DiscreteForwardMap {
    stiffness: CscMatrix<f64>,
    interface_mass: Vec<CscMatrix<f64>>,
    load_map: DMatrix<f64>,
    base: DMatrix<f64>,
    coupling: DMatrix<f64>,
    schur: DMatrix<f64>,
    reduced_mass: Vec<Triplets>,
}

/// `F`, its partial derivatives and (optionally) second partials at one point.
#[derive(Debug, Clone)]
pub struct Linearization {
    pub value: SymMatrix,
    /// `∂F/∂γ_j`
    pub partials: Vec<SymMatrix>,
    /// `∂²F/∂γ_i∂γ_j`, row-major `n × n`.
    pub second: Option<Vec<SymMatrix>>,
}

impl DiscreteForwardMap {
    /// Builds the mesh and assembles with `m` boundary currents.
    pub fn assemble(geometry: &Geometry, mesh_size: f64, m: usize) -> Result<Self> {
        let mesh = Mesh::polar(geometry, mesh_size)?;
        Self::from_mesh(&mesh, geometry.num_arcs(), m)
    }

    pub fn from_mesh(mesh: &Mesh, num_arcs: usize, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::validation("need at least one boundary current"));
        }
        let stiffness = assembly::stiffness(mesh);
        let interface_mass = assembly::interface_mass(mesh, num_arcs);
        if let Some(j) = interface_mass.iter().position(|mj| mj.nnz() == 0) {
            return Err(Error::Mesh(format!("arc {j} has no interface edges")));
        }
        let load_map = assembly::load_map(mesh, m);
        Self::condense(stiffness, interface_mass, load_map, mesh.interface_nodes())
    }

    fn condense(
        stiffness: CscMatrix<f64>,
        interface_mass: Vec<CscMatrix<f64>>,
        load_map: DMatrix<f64>,
        interface: std::ops::Range<usize>,
    ) -> Result<Self> {
        let n = stiffness.nrows();
        let ni = interface.len();
        let nr = n - ni;
        // local index: interface vertices keep their order, the rest are packed around them
        let local = |v: usize| -> (bool, usize) {
            if interface.contains(&v) {
                (true, v - interface.start)
            } else if v < interface.start {
                (false, v)
            } else {
                (false, v - ni)
            }
        };

        let mut k_rr = CooMatrix::new(nr, nr);
        let mut k_rg = DMatrix::zeros(nr, ni);
        let mut k_gg = DMatrix::zeros(ni, ni);
        for (i, j, &v) in stiffness.triplet_iter() {
            match (local(i), local(j)) {
                ((false, a), (false, b)) => k_rr.push(a, b, v),
                ((false, a), (true, b)) => k_rg[(a, b)] += v,
                ((true, a), (true, b)) => k_gg[(a, b)] += v,
                ((true, _), (false, _)) => {}
            }
        }
        let factor = CscCholesky::factor(&CscMatrix::from(&k_rr))
            .map_err(|e| Error::Solver(format!("interior stiffness factorization: {e:?}")))?;

        let m = load_map.ncols();
        let mut b_r = DMatrix::zeros(nr, m);
        for v in 0..n {
            if let (false, a) = local(v) {
                b_r.row_mut(a).copy_from(&load_map.row(v));
            } else if load_map.row(v).amax() != 0.0 {
                return Err(Error::Mesh("boundary currents touch the interface".into()));
            }
        }
        let w0 = factor.solve(&b_r);
        let z = factor.solve(&k_rg);
        let base = b_r.transpose() * &w0;
        let coupling = k_rg.transpose() * &w0;
        let schur = k_gg - k_rg.transpose() * z;

        let reduced_mass = interface_mass
            .iter()
            .map(|mj| {
                mj.triplet_iter()
                    .map(|(i, j, &v)| (local(i).1, local(j).1, v))
                    .collect()
            })
            .collect();

        Ok(Self {
            stiffness,
            interface_mass,
            load_map,
            base: symmetrized(base),
            coupling,
            schur: symmetrized(schur),
            reduced_mass,
        })
    }

    pub fn num_arcs(&self) -> usize {
        self.interface_mass.len()
    }

    /// Number of boundary currents `m`.
    pub fn num_currents(&self) -> usize {
        self.load_map.ncols()
    }

    pub fn stiffness(&self) -> &CscMatrix<f64> {
        &self.stiffness
    }

    pub fn interface_mass(&self, j: usize) -> &CscMatrix<f64> {
        &self.interface_mass[j]
    }

    pub fn load_map(&self) -> &DMatrix<f64> {
        &self.load_map
    }

    /// The same map restricted to the first `m` boundary currents.
    pub fn truncated(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.num_currents() {
            return Err(Error::validation(format!(
                "cannot truncate {} currents to {m}",
                self.num_currents()
            )));
        }
        Ok(Self {
            load_map: self.load_map.columns(0, m).into_owned(),
            base: self.base.view((0, 0), (m, m)).into_owned(),
            coupling: self.coupling.columns(0, m).into_owned(),
            ..self.clone()
        })
    }

    /// Rescales the boundary currents by `√c`, which multiplies `F` by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::validation(format!("scale must be > 0, got {c}")));
        }
        let s = c.sqrt();
        Ok(Self {
            load_map: &self.load_map * s,
            base: &self.base * c,
            coupling: &self.coupling * s,
            ..self.clone()
        })
    }

    /// Multiplies `M_j` by `factor`. A negative factor breaks monotonicity, which the
    /// property runner uses to check that it catches violations.
    pub fn with_interface_mass_scaled(&self, j: usize, factor: f64) -> Result<Self> {
        if j >= self.num_arcs() {
            return Err(Error::validation(format!("no arc {j}")));
        }
        let mut out = self.clone();
        out.interface_mass[j] = &self.interface_mass[j] * factor;
        for t in &mut out.reduced_mass[j] {
            t.2 *= factor;
        }
        Ok(out)
    }

    fn check_gamma(&self, gamma: &[f64]) -> Result<()> {
        if gamma.len() != self.num_arcs() {
            return Err(Error::DimensionMismatch {
                left: gamma.len(),
                right: self.num_arcs(),
            });
        }
        CoefficientVector::positive(gamma.to_vec()).map(|_| ())
    }

    fn check_direction(&self, d: &[f64]) -> Result<()> {
        if d.len() != self.num_arcs() {
            return Err(Error::DimensionMismatch {
                left: d.len(),
                right: self.num_arcs(),
            });
        }
        Ok(())
    }

    /// `M(w) X` for `M(w) = Σ_j w_j M_j^Γ`.
    fn apply_mass(&self, weights: &[f64], x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(x.nrows(), x.ncols());
        for (triplets, &w) in self.reduced_mass.iter().zip(weights) {
            if w == 0.0 {
                continue;
            }
            for &(i, j, v) in triplets {
                let s = w * v;
                for c in 0..x.ncols() {
                    out[(i, c)] += s * x[(j, c)];
                }
            }
        }
        out
    }

    fn factor_interface(&self, gamma: &[f64]) -> Result<Cholesky<f64, Dyn>> {
        let mut t = self.schur.clone();
        for (triplets, &g) in self.reduced_mass.iter().zip(gamma) {
            for &(i, j, v) in triplets {
                t[(i, j)] += g * v;
            }
        }
        Cholesky::new(t)
            .ok_or_else(|| Error::Solver("interface system is not positive definite".into()))
    }

    /// `F(γ) = Bᵀ A(γ)⁻¹ B`.
    pub fn eval_f(&self, gamma: &[f64]) -> Result<SymMatrix> {
        self.check_gamma(gamma)?;
        let chol = self.factor_interface(gamma)?;
        let x = chol.solve(&self.coupling);
        SymMatrix::from_matrix(&self.base + self.coupling.transpose() * x)
    }

    /// `F'(γ)d = −Bᵀ A(γ)⁻¹ (Σ_j d_j M_j) A(γ)⁻¹ B`.
    pub fn eval_f_prime(&self, gamma: &[f64], d: &[f64]) -> Result<SymMatrix> {
        self.check_gamma(gamma)?;
        self.check_direction(d)?;
        let chol = self.factor_interface(gamma)?;
        let x = chol.solve(&self.coupling);
        let mx = self.apply_mass(d, &x);
        SymMatrix::from_matrix(-(x.transpose() * mx))
    }

    /// Value and derivatives at `gamma`, sharing one factorization.
    pub fn linearize(&self, gamma: &[f64], second_order: bool) -> Result<Linearization> {
        self.check_gamma(gamma)?;
        let n = self.num_arcs();
        let chol = self.factor_interface(gamma)?;
        let x = chol.solve(&self.coupling);
        let value = SymMatrix::from_matrix(&self.base + self.coupling.transpose() * &x)?;
        let mut unit = vec![0.0; n];
        let mx: Vec<DMatrix<f64>> = (0..n)
            .map(|j| {
                unit.fill(0.0);
                unit[j] = 1.0;
                self.apply_mass(&unit, &x)
            })
            .collect();
        let partials = mx
            .iter()
            .map(|mxj| SymMatrix::from_matrix(-(x.transpose() * mxj)))
            .collect::<Result<Vec<_>>>()?;
        let second = if second_order {
            let y: Vec<DMatrix<f64>> = mx.iter().map(|mxj| chol.solve(mxj)).collect();
            let mut out = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    out.push(SymMatrix::from_matrix(
                        mx[i].transpose() * &y[j] + mx[j].transpose() * &y[i],
                    )?);
                }
            }
            Some(out)
        } else {
            None
        };
        Ok(Linearization {
            value,
            partials,
            second,
        })
    }

    /// `F(γ)` by a sparse Cholesky factorization of the full `A(γ)`, without the
    /// interface condensation. Slower; used to cross-check [`Self::eval_f`].
    pub fn eval_f_direct(&self, gamma: &[f64]) -> Result<SymMatrix> {
        self.check_gamma(gamma)?;
        let n = self.stiffness.nrows();
        let mut coo = CooMatrix::new(n, n);
        for (i, j, &v) in self.stiffness.triplet_iter() {
            coo.push(i, j, v);
        }
        for (mj, &g) in self.interface_mass.iter().zip(gamma) {
            for (i, j, &v) in mj.triplet_iter() {
                coo.push(i, j, g * v);
            }
        }
        let factor = CscCholesky::factor(&CscMatrix::from(&coo))
            .map_err(|e| Error::Solver(format!("A(gamma) factorization: {e:?}")))?;
        let w = factor.solve(&self.load_map);
        SymMatrix::from_matrix(self.load_map.transpose() * w)
    }
}

fn symmetrized(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmat::{lambda_max, loewner_leq, spectral_norm};

    fn map(m: usize) -> DiscreteForwardMap {
        DiscreteForwardMap::assemble(&Geometry::disk(2, 0.5, 8).unwrap(), 0.1, m).unwrap()
    }

    #[test]
    fn condensed_matches_direct_solve() {
        let f = map(5);
        for gamma in [[1.0, 1.0], [1.3, 1.9], [0.2, 5.0]] {
            let a = f.eval_f(&gamma).unwrap();
            let b = f.eval_f_direct(&gamma).unwrap();
            let diff = spectral_norm(&a.try_sub(&b).unwrap());
            assert!(diff < 1e-11 * spectral_norm(&a), "{diff}");
        }
    }

    #[test]
    fn coercive_at_unit_gamma() {
        let f = map(3);
        assert!(f.factor_interface(&[1.0, 1.0]).is_ok());
        assert!(f.eval_f_direct(&[1.0, 1.0]).is_ok());
    }

    #[test]
    fn two_nonzero_interface_masses() {
        let f = map(3);
        assert_eq!(f.num_arcs(), 2);
        for j in 0..2 {
            assert!(f.interface_mass(j).values().iter().any(|&v| v != 0.0));
        }
    }

    #[test]
    fn load_map_has_m_columns() {
        let f = map(5);
        assert_eq!(f.load_map().ncols(), 5);
        for k in 0..5 {
            assert!(f.load_map().column(k).norm() > 0.0);
        }
    }

    #[test]
    fn zero_direction_gives_zero_derivative() {
        let f = map(4);
        let d = f.eval_f_prime(&[1.2, 1.7], &[0.0, 0.0]).unwrap();
        assert_eq!(d.norm_fro(), 0.0);
    }

    #[test]
    fn nonnegative_direction_is_nonpositive() {
        let f = map(6);
        let d = f.eval_f_prime(&[1.2, 1.7], &[0.3, 2.0]).unwrap();
        assert!(lambda_max(&d) <= 1e-10);
    }

    #[test]
    fn monotone_in_gamma() {
        let f = map(6);
        let lo = f.eval_f(&[1.1, 1.4]).unwrap();
        let hi = f.eval_f(&[1.5, 1.4]).unwrap();
        assert!(loewner_leq(&hi, &lo, 1e-10).unwrap());
    }

    #[test]
    fn rejects_nonpositive_gamma() {
        let f = map(2);
        assert!(matches!(f.eval_f(&[1.0, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(f.eval_f(&[1.0, -2.0]), Err(Error::Domain(_))));
        assert!(matches!(
            f.eval_f(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn truncation_is_leading_block() {
        let f = map(7);
        let g = [1.4, 1.1];
        let full = f.eval_f(&g).unwrap();
        let small = f.truncated(3).unwrap().eval_f(&g).unwrap();
        let diff = small.try_sub(&full.leading(3).unwrap()).unwrap().norm_fro();
        assert!(diff < 1e-14, "{diff}");
        assert!(f.truncated(0).is_err());
        assert!(f.truncated(8).is_err());
    }

    #[test]
    fn linearization_matches_single_evaluations() {
        let f = map(5);
        let g = [1.3, 1.6];
        let lin = f.linearize(&g, true).unwrap();
        assert_eq!(lin.value, f.eval_f(&g).unwrap());
        let p1 = f.eval_f_prime(&g, &[0.0, 1.0]).unwrap();
        assert!(lin.partials[1].try_sub(&p1).unwrap().norm_fro() < 1e-14);
        // second partials by central differences of the first
        let h = 1e-5;
        let second = lin.second.unwrap();
        for i in 0..2 {
            let mut gp = g;
            let mut gm = g;
            gp[i] += h;
            gm[i] -= h;
            let lp = f.linearize(&gp, false).unwrap();
            let lm = f.linearize(&gm, false).unwrap();
            for j in 0..2 {
                let fd = lp.partials[j]
                    .try_sub(&lm.partials[j])
                    .unwrap()
                    .scale(0.5 / h);
                let err = fd.try_sub(&second[i * 2 + j]).unwrap().norm_fro();
                assert!(
                    err < 1e-6 * (1.0 + second[i * 2 + j].norm_fro()),
                    "{i}{j}: {err}"
                );
            }
        }
    }

    #[test]
    fn scaling_multiplies_f() {
        let f = map(4);
        let g = [1.2, 1.9];
        let a = f.eval_f(&g).unwrap().scale(3.0);
        let b = f.scaled(3.0).unwrap().eval_f(&g).unwrap();
        assert!(a.try_sub(&b).unwrap().norm_fro() < 1e-13);
    }
}
