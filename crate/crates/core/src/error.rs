use thiserror::Error;

/// Errors raised by the quaternionic operator routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quaternion modulus {modulus:e} is below the zero threshold")]
    ZeroDivisor { modulus: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix violates the complex-adjoint block symmetry (defect {defect:e})")]
    NotAdjointShaped { defect: f64 },

    #[error("matrix is singular (sigma_min = {sigma_min:e}, sigma_max = {sigma_max:e})")]
    Singular { sigma_min: f64, sigma_max: f64 },

    #[error("point lies in the S-spectrum (pencil sigma_min = {margin:e})")]
    SpectrumPoint { margin: f64 },

    #[error("resolvent series diverges: |s| = {modulus} does not exceed r_S = {radius}")]
    Divergent { modulus: f64, radius: f64 },

    #[error("{0}")]
    Domain(String),

    #[error("|q| = {modulus} is outside the convergence radius {radius}")]
    OutOfRadius { modulus: f64, radius: f64 },

    #[error("contour of radius {radius} passes within {distance:e} of the S-spectrum")]
    ContourThroughSpectrum { radius: f64, distance: f64 },

    #[error("quadrature did not settle: doubling the nodes changed the result by {change:e}")]
    DivergedQuadrature { change: f64 },
}

impl Error {
    /// Stable name used on the command line and in structured logs.
    pub fn name(&self) -> &'static str {
        match self {
            Error::ZeroDivisor { .. } => "ZeroDivisor",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NotAdjointShaped { .. } => "NotAdjointShaped",
            Error::Singular { .. } => "Singular",
            Error::SpectrumPoint { .. } => "SpectrumPoint",
            Error::Divergent { .. } => "Divergent",
            Error::Domain(_) => "DomainError",
            Error::OutOfRadius { .. } => "OutOfRadius",
            Error::ContourThroughSpectrum { .. } => "ContourThroughSpectrum",
            Error::DivergedQuadrature { .. } => "DivergedQuadrature",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
