use thiserror::Error;

/// Error taxonomy shared by every module.
///
/// `Structural` covers mismatched rings (different prime, variable set,
/// truncation or floor). `Domain` covers inputs outside an operation's
/// mathematical domain (nonzero constant term in a composition slot,
/// unclassifiable quadric dimension, inconsistent descriptor flags).
/// `NonUnitDivision` is raised when a division would need the inverse of a
/// non-unit of Z_(p). `NotIntegral` reports a formal group law whose
/// coefficients leave Z_(p). `Inconsistent` flags an internal cross-check
/// failure (two routes to the same value disagree).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("structural error: {0}")]
    Structural(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("non-unit division: {0}")]
    NonUnitDivision(String),
    #[error("logarithm not integral: {0}")]
    NotIntegral(String),
    #[error("inconsistency: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, AlgebraError>;
