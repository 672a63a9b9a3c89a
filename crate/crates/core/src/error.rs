use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid input: {0}")]
    Validation(String),

    /// A coefficient left the open positive orthant.
    #[error("coefficient out of domain: {0}")]
    Domain(String),

    #[error("linear solver failed: {0}")]
    Solver(String),

    #[error("mesh generation failed: {0}")]
    Mesh(String),

    #[error("problem is infeasible: lambda_max(F(b*1) - target) = {violation:e}")]
    Infeasible { violation: f64 },

    #[error("no convergence after {iterations} Newton steps (best objective {objective})")]
    NonConvergence {
        iterations: usize,
        best: Vec<f64>,
        objective: f64,
    },

    #[error("criterion not met for m <= {m_max} (best lambda {best_lambda:e} at m = {best_m})")]
    CriterionNotMet {
        m_max: usize,
        best_m: usize,
        best_lambda: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// Process exit code used by the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CriterionNotMet { .. } => 2,
            Error::Infeasible { .. } => 3,
            Error::NonConvergence { .. } => 4,
            _ => 1,
        }
    }
}
