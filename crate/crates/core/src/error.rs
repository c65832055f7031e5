use thiserror::Error;

/// Errors raised by the certification toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("duplicate bus id {0}")]
    DuplicateBus(i64),
    #[error("line references unknown bus {0}")]
    UnknownEndpoint(i64),
    #[error("bus {id}: {field} must be positive (got {value})")]
    NonPositive {
        id: i64,
        field: &'static str,
        value: f64,
    },
    #[error("network graph is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("case file has no baseMVA statement")]
    MissingBaseMva,
    #[error("Newton iteration did not converge in {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("equilibrium has max |angle difference| {margin} >= pi/2")]
    EquilibriumOutsidePolytope { margin: f64 },
    #[error("injections do not sum to zero (imbalance {0:e})")]
    Unbalanced(f64),
    #[error("angle {0} is outside [0, pi/2)")]
    AngleOutOfRange(f64),
    #[error("sector gain {0} is outside (0, 1)")]
    GainOutOfRange(f64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unknown line {0}-{1}")]
    UnknownLine(i64, i64),
    #[error("certificate of kind {found} cannot be used here (expected {expected})")]
    WrongCertificateKind {
        expected: &'static str,
        found: &'static str,
    },
    #[error("integration produced a non-finite state; last finite time {last_finite_time}")]
    NonFinite { last_finite_time: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
