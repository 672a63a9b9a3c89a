//! Reconstruction of a piecewise-constant Robin transmission coefficient from
//! finitely many Neumann–Dirichlet measurements.
//!
//! The pipeline has four layers:
//!
//! - [`symmat`]: dense symmetric matrices, eigenvalues and Loewner-order predicates.
//! - [`fem`]: a P1 finite element discretization of the transmission problem on a
//!   disk with a concentric interface, exposing the measurement map `F(γ)` and its
//!   directional derivatives.
//! - [`criterion`]: the finite set of probe points and directions whose derivative
//!   matrices certify unique solvability, plus the sweep over the number of
//!   measurements.
//! - [`sdp`]: reconstruction strategies for `minimize Σ γ_j s.t. γ ∈ [a,b]ⁿ, F(γ) ⪯ Y`,
//!   registered by name.
//!
//! [`experiment`] wires them into the `robin-sdp` command line tool.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coefficient;
pub mod criterion;
pub mod error;
pub mod experiment;
pub mod fem;
pub mod sdp;
pub mod symmat;

pub use coefficient::CoefficientVector;
pub use criterion::{BoxBounds, CriterionData};
pub use error::{Error, Result};
pub use fem::{DiscreteForwardMap, Geometry, Mesh};
pub use sdp::{ReconstructionResult, Reconstructor, SdpProblem, SolverOptions, StrategyRegistry};
pub use symmat::SymMatrix;
