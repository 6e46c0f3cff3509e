use thiserror::Error;

/// Failures raised by the solvers and parameter constructors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FridgeError {
    #[error("{field}: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("steady state is not unique (second-smallest singular value ratio {ratio:.3e})")]
    NonUniqueSteadyState { ratio: f64 },

    #[error("quadrature did not converge after {subdivisions} subdivisions (error estimate {error:.3e})")]
    QuadratureFailure { subdivisions: usize, error: f64 },

    #[error("population dynamics are not stable: {0}")]
    Unstable(String),

    #[error("population dynamics do not close on themselves (coherence coupling {coupling:.3e})")]
    Structure { coupling: f64 },

    #[error("threshold undefined: detuning and epsilon - mu must have opposite signs")]
    SignConditionViolated,
}

pub type Result<T> = std::result::Result<T, FridgeError>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> FridgeError {
    FridgeError::InvalidParameter {
        field,
        reason: reason.into(),
    }
}

pub(crate) fn require_finite(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, "must be finite"))
    }
}

pub(crate) fn require_positive(field: &'static str, value: f64) -> Result<()> {
    require_finite(field, value)?;
    if value > 0.0 {
        Ok(())
    } else {
        Err(invalid(field, "must be > 0"))
    }
}

pub(crate) fn require_non_negative(field: &'static str, value: f64) -> Result<()> {
    require_finite(field, value)?;
    if value >= 0.0 {
        Ok(())
    } else {
        Err(invalid(field, "must be >= 0"))
    }
}
