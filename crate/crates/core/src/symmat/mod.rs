//! Dense symmetric matrices and Loewner-order predicates.
//!
//! `A ⪯ B` holds iff `B − A` is positive semidefinite, i.e. iff
//! `λ_max(A − B) ≤ 0`. Every predicate here takes an explicit slack so exact
//! and noise-tolerant comparisons use the same code path.

mod eigen;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use eigen::{eigensolver, CyclicJacobi, SymmetricEigensolver, TridiagonalQr, EIGENSOLVERS};

/// Dense symmetric `m × m` matrix.
///
/// Construction symmetrizes the input as `(A + Aᵀ)/2`, so `get(i, j) == get(j, i)`
/// holds bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SymMatrix {
    data: DMatrix<f64>,
}

impl SymMatrix {
    /// Symmetrizes a square matrix.
    pub fn from_matrix(mut data: DMatrix<f64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::DimensionMismatch {
                left: data.nrows(),
                right: data.ncols(),
            });
        }
        if data.nrows() == 0 {
            return Err(Error::validation("symmetric matrix must have dim >= 1"));
        }
        let m = data.nrows();
        for j in 0..m {
            for i in (j + 1)..m {
                let v = 0.5 * (data[(i, j)] + data[(j, i)]);
                data[(i, j)] = v;
                data[(j, i)] = v;
            }
        }
        Ok(Self { data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != m) {
            return Err(Error::DimensionMismatch {
                left: m,
                right: bad.len(),
            });
        }
        Self::from_matrix(DMatrix::from_fn(m, m, |i, j| rows[i][j]))
    }

    pub fn zeros(m: usize) -> Self {
        assert!(m >= 1, "symmetric matrix must have dim >= 1");
        Self {
            data: DMatrix::zeros(m, m),
        }
    }

    pub fn identity(m: usize) -> Self {
        assert!(m >= 1, "symmetric matrix must have dim >= 1");
        Self {
            data: DMatrix::identity(m, m),
        }
    }

    pub fn diag(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "symmetric matrix must have dim >= 1");
        Self {
            data: DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(values)),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    fn check_dim(&self, other: &SymMatrix) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &SymMatrix) -> Result<SymMatrix> {
        self.check_dim(other)?;
        Ok(Self {
            data: &self.data + &other.data,
        })
    }

    pub fn try_sub(&self, other: &SymMatrix) -> Result<SymMatrix> {
        self.check_dim(other)?;
        Ok(Self {
            data: &self.data - &other.data,
        })
    }

    pub fn scale(&self, c: f64) -> SymMatrix {
        Self {
            data: &self.data * c,
        }
    }

    /// `self + s·I`.
    pub fn shift(&self, s: f64) -> SymMatrix {
        let mut data = self.data.clone();
        for i in 0..self.dim() {
            data[(i, i)] += s;
        }
        Self { data }
    }

    /// Leading `k × k` principal submatrix.
    pub fn leading(&self, k: usize) -> Result<SymMatrix> {
        if k == 0 || k > self.dim() {
            return Err(Error::validation(format!(
                "leading block of size {k} requested from a {0}x{0} matrix",
                self.dim()
            )));
        }
        Ok(Self {
            data: self.data.view((0, 0), (k, k)).into_owned(),
        })
    }

    /// Frobenius norm.
    pub fn norm_fro(&self) -> f64 {
        self.data.norm()
    }

    /// Eigenvalues in ascending order, computed with the default eigensolver.
    pub fn eigenvalues(&self) -> Vec<f64> {
        TridiagonalQr.eigenvalues(self)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| self.data.row(i).iter().copied().collect())
            .collect()
    }
}

impl TryFrom<Vec<Vec<f64>>> for SymMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(&rows)
    }
}

impl From<SymMatrix> for Vec<Vec<f64>> {
    fn from(m: SymMatrix) -> Self {
        m.to_rows()
    }
}

pub fn lambda_max(a: &SymMatrix) -> f64 {
    *a.eigenvalues().last().expect("dim >= 1")
}

pub fn lambda_min(a: &SymMatrix) -> f64 {
    a.eigenvalues()[0]
}

/// `max(|λ_min|, |λ_max|)`.
pub fn spectral_norm(a: &SymMatrix) -> f64 {
    let ev = a.eigenvalues();
    ev[0].abs().max(ev[ev.len() - 1].abs())
}

/// `A ⪯ B` up to `slack`: true iff `λ_max(A − B) ≤ slack`.
pub fn loewner_leq(a: &SymMatrix, b: &SymMatrix, slack: f64) -> Result<bool> {
    if !(slack >= 0.0) {
        return Err(Error::validation(format!(
            "slack must be >= 0, got {slack}"
        )));
    }
    Ok(lambda_max(&a.try_sub(b)?) <= slack)
}
