//! Non-retarded Casimir / van der Waals interaction between a metallic
//! nanosphere and a substrate, computed through the spectral representation
//! of the image-dipole coupling.
//!
//! The geometry enters only through a dimensionless 3×3 interaction matrix
//! whose eigenvalues locate the proper electromagnetic modes; the materials
//! enter only through the spectral variable u(ω) of the sphere and the
//! contrast factor of the substrate. On top of that factorization the crate
//! provides:
//!
//! - [`materials`]: Drude / constant / perfect-conductor models, u(ω), the
//!   contrast factor, and the named preset table (K, Au, Ag, Al, Al2O3,
//!   TiO2, Inf).
//! - [`spectral`]: geometry, the image-dipole coupling tensor, the
//!   interaction matrix, its numeric symmetric eigendecomposition, and the
//!   Green's-operator trace.
//! - [`modes`]: proper-mode frequencies, the zero-point mode-sum interaction
//!   energy, and the force with analytic and finite-difference derivatives.
//! - [`dos`]: density of states with finite damping (Lorentzian sum and
//!   Green's-trace routes) and the quadrature energy with its z → ∞
//!   subtraction.
//! - [`pfa`]: proximity-theorem comparator.
//! - [`sweep`]: deterministic parameter sweeps, CSV/JSON emission, and
//!   power-law fits; driven by the `casimir-sweep` binary.

// Validation guards are written as `!(x > 0.0)` so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dos;
pub mod emit;
pub mod error;
pub mod linalg;
pub mod materials;
pub mod modes;
pub mod pfa;
pub mod quadrature;
pub mod spectral;
pub mod sweep;
pub mod system;

pub use error::{Error, Result};
pub use materials::{
    contrast_factor, epsilon_at, spectral_variable, DielectricModel, MaterialLibrary,
};
pub use modes::{
    force, interaction_energy, mode_frequencies, DerivativeMethod, EnergyMethod, EnergyResult,
    ForceResult, ModeSpectrum, EV_PER_NM_TO_PN,
};
pub use spectral::{
    dipole_tensor, eigen_decompose, greens_trace, interaction_matrix, Geometry,
    SpectralDecomposition, N0,
};
pub use system::SystemSpec;
