use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no sign change on bracket [{lo}, {hi}]: f(lo)={f_lo}, f(hi)={f_hi}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// The condensation equation has no root (bulk mass outside (0, 1)).
    #[error("infeasible condensation equation: bulk mass {bulk_mass} outside (0, 1)")]
    Infeasible { bulk_mass: f64 },

    #[error("integration error: {0}")]
    Integration(String),

    /// λ + k·s(x) is not positive on the whole bulk.
    #[error("regime violation: {0}")]
    Regime(String),

    /// Grid does not cover the probability mass of the density.
    #[error("coverage error: {0}")]
    Coverage(String),

    /// Zero variance (ZF with α = 1): Gaussian-type approximations do not exist.
    #[error("degenerate variance: {0}")]
    Degenerate(String),

    #[error("numeric failure: {0}")]
    Numeric(String),
}
