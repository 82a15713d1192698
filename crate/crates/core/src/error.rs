use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The positron light-cone momentum leaves no room for the electron.
    #[error("phase space closed: positron p⁻ = {p_minus} is not below k_γ⁻ = {limit}")]
    PhaseSpaceClosed { p_minus: f64, limit: f64 },

    #[error("pulse shape vanishes identically; cannot normalise ξ = {xi}")]
    DegenerateShape { xi: f64 },

    #[error("lepton collinear with the laser axis (k·p = {k_dot_p:e})")]
    CollinearSingularity { k_dot_p: f64 },

    #[error("regularised matrix element is singular (|Q⁰| = {q0:e})")]
    RegularizationSingular { q0: f64 },

    #[error("quadrature under-resolved: {required} nodes needed, at most {available} available")]
    QuadratureUnderResolved { required: usize, available: usize },

    #[error("grid not converged: {0}")]
    GridUnconverged(String),

    #[error("parse error at line {line}, field `{field}`: {message}")]
    Parse {
        line: usize,
        field: String,
        message: String,
    },

    #[error("invalid configuration, {field}: {message}")]
    Validation { field: String, message: String },
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Stable machine-readable category, used for CLI diagnostics.
    pub fn category(&self) -> &'static str {
        match self {
            Error::PhaseSpaceClosed { .. } => "phase-space-closed",
            Error::DegenerateShape { .. } => "degenerate-shape",
            Error::CollinearSingularity { .. } => "collinear-singularity",
            Error::RegularizationSingular { .. } => "regularization-singular",
            Error::QuadratureUnderResolved { .. } => "quadrature-under-resolved",
            Error::GridUnconverged(_) => "grid-unconverged",
            Error::Parse { .. } => "parse-error",
            Error::Validation { .. } => "validation-error",
        }
    }
}
