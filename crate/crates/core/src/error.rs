use thiserror::Error;

/// Errors raised by the physics and numerics layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cavity length {length} is not positive at t = {t}")]
    NonPositiveLength { t: f64, length: f64 },

    #[error("invalid cavity profile: {0}")]
    InvalidProfile(String),

    #[error("t = {t} lies outside the profile domain [{start}, {end}]")]
    OutsideDomain { t: f64, start: f64, end: f64 },

    #[error("profile is not differentiable at t = {t} (length discontinuity)")]
    NotDifferentiable { t: f64 },

    #[error("quadrature did not reach tolerance {requested:e} (error estimate {estimate:e})")]
    QuadratureFailure { requested: f64, estimate: f64 },

    #[error("integrator could not meet tolerance at t = {t}: {reason}")]
    ToleranceNotMet { t: f64, reason: String },

    #[error("Bogoliubov invariant drift {drift:e} exceeds {limit:e} at t = {t}")]
    InvariantViolation { t: f64, drift: f64, limit: f64 },

    #[error("photon number must be positive, got {0}")]
    NonPositivePhotonNumber(f64),

    #[error("root could not be bracketed in [{lo}, {hi}]")]
    RootBracketFailure { lo: f64, hi: f64 },

    #[error("no efficiency threshold found up to t = {searched_to}")]
    NoThresholdInRange { searched_to: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite, got {value}"),
        })
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    check_finite(name, value)?;
    if value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be > 0, got {value}"),
        })
    }
}

pub(crate) fn check_non_negative(name: &'static str, value: f64) -> Result<()> {
    check_finite(name, value)?;
    if value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be >= 0, got {value}"),
        })
    }
}
