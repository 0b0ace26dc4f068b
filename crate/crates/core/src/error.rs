use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the channel model and its numerical machinery.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("matrix is singular or ill-conditioned (condition estimate {condition:e})")]
    Singular { condition: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("drift matrix is not Hurwitz: eigenvalue {eigenvalue} has non-negative real part")]
    NotHurwitz { eigenvalue: Complex64 },

    #[error("degenerate resonance denominator at omega = {omega:e}")]
    DegenerateDenominator { omega: f64 },

    #[error("covariance matrix is not physical: {0}")]
    Unphysical(String),

    #[error("integration did not settle: {0}")]
    NotSettled(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, reason: format!("{value} is not finite") })
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    check_finite(name, value)?;
    if value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, reason: format!("{value} must be > 0") })
    }
}

pub(crate) fn check_non_negative(name: &'static str, value: f64) -> Result<()> {
    check_finite(name, value)?;
    if value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, reason: format!("{value} must be >= 0") })
    }
}
