use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("constraint output is not relative degree 2: |grad h . g| = {residual:e}")]
    RelativeDegree { residual: f64 },

    #[error("potential inverse undefined at {value:e} (invertible range starts at {lower:e})")]
    PotentialRange { value: f64, lower: f64 },

    #[error("root bracketing failed for potential inverse at {value:e}")]
    Bracket { value: f64 },

    #[error("potential derivative degenerate at the lifted value: |phi(H)| = {value:e}")]
    DegeneratePotential { value: f64 },

    #[error("constraint output undefined: {0}")]
    OutputDomain(&'static str),

    #[error("tolerances violate the feasibility assumption: gamma2 = {gamma2} <= gamma1 + 2 l_h w_x_max = {required}")]
    Infeasible { gamma2: f64, required: f64 },

    #[error("boundary-layer width must be positive, got {0:e}")]
    NonPositiveLayer(f64),

    #[error("control direction degenerate: |d| = {0:e}")]
    DegenerateDirection(f64),

    #[error("qp infeasible: constraints {violated:?} violated by {max_violation:e}")]
    QpInfeasible { violated: Vec<usize>, max_violation: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite state at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("invalid config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config { field: field.into(), reason: reason.into() }
    }
}
