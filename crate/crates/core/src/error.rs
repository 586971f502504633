use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid step function: {0}")]
    InvalidStep(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid transform: {0}")]
    InvalidTransform(String),

    #[error("{what} = {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: String,
    },

    #[error("level {level} has no unique Hardy level point (valid range is ({lower}, {upper}])")]
    LevelRange { level: f64, lower: f64, upper: f64 },

    #[error("integral diverges: {0}")]
    Divergence(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("tree size cap exceeded: {leaves} leaves requested, cap is {cap}")]
    SizeCap { leaves: u128, cap: u128 },

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("target measure {target} not reachable within {tol} at the available depth (residual {residual})")]
    Resolution {
        target: f64,
        tol: f64,
        residual: f64,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("extremal construction needs at least {required} levels, got {levels}")]
    InsufficientLevels { levels: u32, required: u32 },

    #[error("allocation failed: {0}")]
    Allocation(String),

    #[error("quadrature did not converge on [{a}, {b}]")]
    Quadrature { a: f64, b: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(what: &'static str, value: f64, domain: impl Into<String>) -> Error {
    Error::Domain {
        what,
        value,
        domain: domain.into(),
    }
}
