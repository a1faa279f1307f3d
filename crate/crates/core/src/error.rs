//! Crate-wide error type.

use thiserror::Error;

/// Errors from model evaluation, numerics, and file emission.
#[derive(Debug, Error)]
pub enum Error {
    #[error("a perfect conductor has no finite permittivity; branch on the model variant instead")]
    PerfectConductorEpsilon,

    #[error("Drude permittivity requires omega > 0, got {omega_ev} eV")]
    NonPositiveFrequency { omega_ev: f64 },

    #[error("invalid dielectric model: {0}")]
    InvalidModel(String),

    #[error(
        "spectral variable is singular: sphere permittivity equals the ambient at this frequency"
    )]
    SingularSpectralVariable,

    #[error(
        "substrate model must be a real constant or a perfect conductor, got a dispersive model"
    )]
    UnsupportedSubstrate,

    #[error("sphere model must be Drude for mode inversion, got {model}")]
    UnsupportedSphereModel { model: String },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("interaction matrix is not symmetric: relative asymmetry {asymmetry:.3e}")]
    AsymmetricMatrix { asymmetry: f64 },

    #[error("Green's trace pole: u = {u} lies within 1e-14 of eigenvalue {eigenvalue}")]
    GreensPole { u: f64, eigenvalue: f64 },

    #[error(
        "eigensolver did not converge: off-diagonal norm {off_norm:.3e} after {sweeps} sweeps"
    )]
    EigenNoConvergence { off_norm: f64, sweeps: usize },

    #[error("mode inversion requires positive eigenvalues, got {eigenvalue}")]
    NonPositiveEigenvalue { eigenvalue: f64 },

    #[error("central differences need z > 0; use the analytic derivative at contact")]
    DerivativeAtContact,

    #[error("density of states requires damping_ratio > 0; zero damping degenerates the Lorentzians (use mode frequencies instead)")]
    DegenerateDamping,

    #[error("invalid quadrature spec: {0}")]
    InvalidQuadratureSpec(String),

    #[error("quadrature did not converge: error estimate {achieved:.3e} above target {target:.3e} after {panels} panels")]
    QuadratureNoConvergence {
        achieved: f64,
        target: f64,
        panels: usize,
    },

    #[error("PFA diverges at contact: z must be > 0")]
    PfaAtContact,

    #[error("Hamaker variant requires a positive Hamaker constant")]
    MissingHamakerConstant,

    #[error("unknown material '{name}'; available presets: {available}")]
    UnknownMaterial { name: String, available: String },

    #[error("material '{0}' would shadow an immutable preset")]
    PresetShadowed(String),

    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),

    #[error("power-law fit needs at least 8 rows in range, got {0}")]
    FitTooFewPoints(usize),

    #[error("power-law fit range contains a sign change in y; log |y| is undefined")]
    FitSignChange,

    #[error("unknown column '{0}'")]
    UnknownColumn(String),

    #[error("config parse error at line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// CLI exit code category: 2 validation, 3 numerical, 4 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Io { .. } => 4,
            Error::EigenNoConvergence { .. }
            | Error::QuadratureNoConvergence { .. }
            | Error::GreensPole { .. }
            | Error::NonPositiveEigenvalue { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
