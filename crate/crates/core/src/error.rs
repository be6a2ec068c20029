use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside the domain of the model.
    #[error("domain error: {0}")]
    Domain(String),

    /// `γ1(s) − γ2(s) + γ3` vanishes, so the damping-basis expansion of the
    /// initial state is singular.
    #[error("degenerate damping-basis denominator γ1−γ2+γ3 = {denominator:e}")]
    DegenerateDenominator { denominator: f64 },

    /// The adaptive integrator could not meet its tolerance.
    #[error("integration failure at t = {t:e}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("dimension {dim} exceeds the limit {limit}")]
    DimensionOverflow { dim: usize, limit: usize },

    /// Threshold search found no feasible value inside the search range.
    #[error("infeasible at ς = {varsigma}: max violation {max_violation:e}")]
    Infeasible { varsigma: f64, max_violation: f64 },

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
