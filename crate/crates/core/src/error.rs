use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("parameter mismatch: {0}")]
    ParameterMismatch(String),

    #[error("state does not decay at the box edges (relative edge amplitude {edge:.3e})")]
    Support { edge: f64 },

    #[error(
        "phase ramp exponent {exponent:.3} exceeds guard {guard}; max admissible |Im s| is {max_imag:.6}"
    )]
    OverflowGuard {
        exponent: f64,
        guard: f64,
        max_imag: f64,
    },

    #[error("time step {dt} violates the stability bound (dt * spectral scale = {product:.3} > {limit})")]
    Stability { dt: f64, product: f64, limit: f64 },

    #[error("non-finite value encountered at step {step}")]
    NonFinite { step: usize },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// True for failures of numerical guards rather than of input validation.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::OverflowGuard { .. } | Error::Stability { .. } | Error::NonFinite { .. }
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Invalid(_) => "invalid",
            Error::GridMismatch => "grid_mismatch",
            Error::ParameterMismatch(_) => "parameter_mismatch",
            Error::Support { .. } => "support",
            Error::OverflowGuard { .. } => "overflow_guard",
            Error::Stability { .. } => "stability",
            Error::NonFinite { .. } => "non_finite",
            Error::Io { .. } => "io",
            Error::Parse(_) => "parse",
        }
    }
}
