use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid value for `{name}`: {reason}")]
    Domain { name: String, reason: String },

    #[error("field evaluation at ({:e}, {:e}, {:e}) m lies on the current filament", point[0], point[1], point[2])]
    Singularity { point: [f64; 3] },

    #[error(
        "quadrature did not converge ({context}): estimate {estimate:e}, error estimate {error:e}, \
         {intervals} subintervals, {evaluations} integrand evaluations"
    )]
    NonConvergence {
        context: String,
        estimate: f64,
        error: f64,
        intervals: usize,
        evaluations: usize,
    },

    #[error("level shift requested at z = {z}, on or below the cut line Im z = -{gamma:e}")]
    BelowCut { z: Complex64, gamma: f64 },

    #[error("threshold bracket [{lo:e}, {hi:e}] s^-1 does not contain the threshold ({detail})")]
    Bracket { lo: f64, hi: f64, detail: String },

    #[error("{0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn domain(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Domain {
            name: name.into(),
            reason: reason.into(),
        }
    }
}

/// Fails with a domain error unless `value` is finite and strictly positive.
pub(crate) fn require_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(
            name,
            format!("must be finite and > 0, got {value:e}"),
        ))
    }
}
