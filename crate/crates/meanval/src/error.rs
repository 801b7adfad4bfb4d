//! Crate-wide error type.

use crate::expr::{EvalError, ParseError};
use crate::quad::IntegralEstimate;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("integral not finite: {0}")]
    NonIntegrable(String),

    /// The evaluation budget ran out before the tolerance was met. The best
    /// estimate so far travels inside the error so callers can inspect it.
    #[error("evaluation budget exceeded (best estimate {:?} +/- {})", partial.value, partial.abs_error)]
    BudgetExceeded { partial: IntegralEstimate },

    #[error("renormalization region {n} has zero (or indistinguishable-from-zero) mass")]
    ZeroMassRegion { n: u64 },

    #[error("mass ratio sequence does not settle")]
    ThetaDiverges,

    #[error("excluded case: {0}")]
    ExcludedCase(String),

    #[error("schedule term {index} has no detectable mean value")]
    TermDiverged { index: usize },

    #[error("sublevel set escapes its declared bounding box")]
    UnboundedSublevel,

    #[error("translation vector leaves the flag's eventual span")]
    SupportEscapesFlag,

    #[error("matrix is not orthogonal (max deviation {deviation})")]
    NotOrthogonal { deviation: f64 },

    #[error("flag is not contained in the requested subspace (coordinate {missing})")]
    FlagNotContained { missing: usize },

    #[error("measures cannot be combined: {0}")]
    IncompatibleMeasures(String),

    #[error("region unsupported for this measure: {0}")]
    UnsupportedRegion(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable code, used by the CLI report.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NonIntegrable(_) => "NonIntegrable",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::ZeroMassRegion { .. } => "ZeroMassRegion",
            Error::ThetaDiverges => "ThetaDiverges",
            Error::ExcludedCase(_) => "ExcludedCase",
            Error::TermDiverged { .. } => "TermDiverged",
            Error::UnboundedSublevel => "UnboundedSublevel",
            Error::SupportEscapesFlag => "SupportEscapesFlag",
            Error::NotOrthogonal { .. } => "NotOrthogonal",
            Error::FlagNotContained { .. } => "FlagNotContained",
            Error::IncompatibleMeasures(_) => "IncompatibleMeasures",
            Error::UnsupportedRegion(_) => "UnsupportedRegion",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Parse(_) => "ParseError",
            Error::Eval(_) => "EvalError",
            Error::Config(_) => "ConfigInvalid",
            Error::Io(_) => "Io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
