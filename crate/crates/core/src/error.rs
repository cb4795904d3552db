use thiserror::Error;

/// Failures raised by the numerical routines.
///
/// Every variant maps to a stable short code (see [`Error::code`]) that the
/// command line front end prints in its reports.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("domain has no interior nodes")]
    EmptyDomain,
    #[error("grid too coarse: {0}")]
    Resolution(String),
    #[error("fiber parameter t = {0} outside (1, 6)")]
    FiberRange(f64),
    #[error("profile argument x = {0} outside [1, 6]")]
    ProfileRange(f64),
    #[error("negative interval length {0}")]
    NegativeLength(f64),
    #[error("no convergence after {iterations} iterations (last change {last_change:e})")]
    NoConvergence {
        iterations: usize,
        last_change: f64,
        last_iterate: Vec<f64>,
    },
    #[error("obstacle is not compactly contained in the domain")]
    ObstacleOutside,
    #[error("pole too close to the boundary (delta = {delta}, need > {need})")]
    PoleNearBoundary { delta: f64, need: f64 },
    #[error("no (C, alpha) certificate available")]
    NoIndexCertificate,
    #[error("function is not in the Orlicz class: {0}")]
    NotInOrlicz(String),
    #[error("quadrature near the cusp did not reach tolerance ({0:e})")]
    CuspQuadrature(f64),
    #[error("only {0} usable levels, need at least 4")]
    ScanRange(usize),
    #[error("samples are not aligned on rotation orbits: {0}")]
    GridMismatch(String),
    #[error("parameters are not admissible: {0}")]
    Inadmissible(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyDomain => "empty-domain",
            Error::Resolution(_) => "resolution",
            Error::FiberRange(_) => "fiber-range",
            Error::ProfileRange(_) => "profile-range",
            Error::NegativeLength(_) => "negative-length",
            Error::NoConvergence { .. } => "no-convergence",
            Error::ObstacleOutside => "obstacle-outside",
            Error::PoleNearBoundary { .. } => "pole-near-boundary",
            Error::NoIndexCertificate => "no-index-certificate",
            Error::NotInOrlicz(_) => "not-in-orlicz",
            Error::CuspQuadrature(_) => "cusp-quadrature",
            Error::ScanRange(_) => "scan-range",
            Error::GridMismatch(_) => "grid-mismatch",
            Error::Inadmissible(_) => "inadmissible",
            Error::InvalidInput(_) => "invalid-input",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
