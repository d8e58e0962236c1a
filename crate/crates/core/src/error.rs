use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure mode of the toolkit.
///
/// Variants split into two families: invalid input ([`Error::is_validation`])
/// and numerical diagnostics that exceeded their tolerance. The command-line
/// front end maps them to different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid value for `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("malformed input at `{field}`: {reason}")]
    Parse { field: String, reason: String },

    #[error("permittivity pole hit at ω = {omega} (resonance {resonance})")]
    PoleHit { omega: Complex64, resonance: usize },

    #[error("medium is lossless; {0} requires every γ > 0")]
    LosslessUnsupported(&'static str),

    #[error("root count mismatch: winding number gives {expected}, Newton polishing found {found}")]
    RootCountMismatch { expected: usize, found: usize },

    #[error("contour passes too close to a zero or pole near {near}")]
    ContourTooClose { near: Complex64 },

    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),

    #[error("incomplete root set: im-sum = {im_sum:e}, re-sum − 1 = {re_defect:e}")]
    IncompleteRootSet { im_sum: f64, re_defect: f64 },

    #[error("requested time span {requested} exceeds the inversion window {window}")]
    Aliasing { requested: f64, window: f64 },

    #[error("branch of √ε is ambiguous at ω = {omega}")]
    BranchAmbiguity { omega: Complex64 },

    #[error("linear system is singular (condition estimate {condition:e})")]
    SingularSystem { condition: f64 },

    #[error("Hopfield transformation is singular (degenerate branches Ω₊ = Ω₋)")]
    SingularTransform,

    #[error("window captures the resonance poorly: {edge_fraction:.3e} of the integrand mass lies at the edges")]
    WindowViolation { edge_fraction: f64 },

    #[error("energy drift {drift:e} exceeded the bound {bound:e} at t = {time}")]
    Stability { drift: f64, bound: f64, time: f64 },

    #[error("{cells} cells exceed the dense-solver cap of {cap}")]
    TooManyCells { cells: usize, cap: usize },

    #[error("numerical check failed: {0}")]
    Tolerance(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { field: field.into(), reason: reason.into() }
    }

    /// `true` when the error stems from caller input rather than from a
    /// numerical diagnostic.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::Parse { .. }
                | Error::LosslessUnsupported(_)
                | Error::TooManyCells { .. }
                | Error::Io(_)
        )
    }

    /// Offending field for validation errors, if one is known.
    pub fn field(&self) -> Option<&str> {
        match self {
            Error::InvalidParameter { field, .. } | Error::Parse { field, .. } => Some(field),
            _ => None,
        }
    }
}
