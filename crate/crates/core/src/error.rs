use thiserror::Error;

/// Errors raised by jet evaluation, tensor assembly, integration and the oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point outside the domain of {metric}: {detail}")]
    Domain { metric: String, detail: String },

    #[error("degenerate velocity: {0}")]
    DegenerateVelocity(String),

    #[error("singular metric tensor (|det g| = {det:e}, pivot ratio {pivot_ratio:e})")]
    SingularMetric { det: f64, pivot_ratio: f64 },

    #[error("angular metric has rank deficit {deficit} (expected exactly one null direction)")]
    DegenerateAngularMetric { deficit: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("integrator stalled at t = {t}: step size {step:e} below minimum")]
    IntegratorStall { t: f64, step: f64 },

    #[error("backward integration requested for non-reversible metric {0}")]
    NonReversibleBackward(String),

    #[error("det g and det g~ have opposite signs ({det:e} vs {det_tilde:e})")]
    SignMismatch { det: f64, det_tilde: f64 },

    #[error("oracle ill-conditioned: condition number {0:e} exceeds 1e12")]
    OracleConditioning(f64),

    #[error("oracle scope exceeded: n = {n} > {max}")]
    OracleScopeExceeded { n: usize, max: usize },

    #[error("invariant violated: {what} = {value:e} exceeds bound {bound:e}")]
    InvariantViolation {
        what: &'static str,
        value: f64,
        bound: f64,
    },
}

impl Error {
    pub(crate) fn domain(metric: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Domain {
            metric: metric.into(),
            detail: detail.into(),
        }
    }

    /// True for errors that come from leaving a metric's domain.
    pub fn is_domain(&self) -> bool {
        matches!(self, Error::Domain { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
