//! P1 finite element discretization of the Robin transmission problem
//!
//! ```text
//! Δu = 0 in Ω∖Γ,   ∂_ν u = g on ∂Ω,   [u]_Γ = 0,   [∂_ν u]_Γ = γ u on Γ
//! ```
//!
//! whose weak form is `∫_Ω ∇u·∇v + Σ_j γ_j ∫_{Γ_j} u v = ∫_{∂Ω} g v`.

pub mod assembly;
mod forward;
mod geometry;
mod mesh;

pub use forward::{DiscreteForwardMap, Linearization};
pub use geometry::{build_disk_geometry, Geometry};
pub use mesh::{InterfaceEdge, Mesh};
