use thiserror::Error;

/// Everything that can go wrong inside the library.
///
/// Variants are grouped by how a caller should react: model violations mean
/// the input function or coin field is outside the admissible class, the
/// numerical variants mean a computation could not be completed reliably.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("model violation: {0}")]
    ModelViolation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("boundary phase must be unimodular, got |{name}| = {modulus}")]
    Boundary { name: &'static str, modulus: f64 },

    #[error("matrix {index} is not unimodular: |det| = {det_abs}")]
    NotUnimodular { index: usize, det_abs: f64 },

    #[error("matrix is not conjugate to SL(2,R): imaginary residue {residue:e}")]
    Conjugation { residue: f64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("z is within {bound:e} of the spectrum")]
    NearSingular { bound: f64 },

    #[error("inverse iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("found {found} eigenphases, expected {expected}")]
    MissedEigenvalue { found: usize, expected: usize },

    #[error("gauge transform failed: {0}")]
    Gauge(String),
}

impl Error {
    /// True for errors caused by the model rather than by the numerics.
    pub fn is_model_violation(&self) -> bool {
        matches!(
            self,
            Error::ModelViolation(_) | Error::Boundary { .. } | Error::Gauge(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
