use thiserror::Error;

/// Errors reported by the exact-arithmetic toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("point {0} is outside the domain [0, 1)")]
    PointOutOfDomain(String),

    #[error("invalid interval exchange: {0}")]
    InvalidIet(String),

    #[error("invalid affine interval exchange: {0}")]
    InvalidAiet(String),

    #[error("theta too large: drifted length at index {index} is not positive")]
    ThetaTooLarge { index: usize },

    #[error("direction must sum to zero")]
    DirectionNotZeroSum,

    #[error("map is not {q}-rational")]
    NotQRational { q: u64 },

    #[error("underlying permutation is not admissible")]
    NotAdmissible,

    #[error("rational case delegated: the base map is {q}-rational")]
    RationalCaseDelegated { q: u64 },

    #[error("no drift power found within cap {cap}")]
    NoDriftPower { cap: u64 },

    #[error("empty drift window: need eps < alpha/4")]
    EmptyDriftWindow,

    #[error("q = {q} is smaller than the interval count n = {n}")]
    QTooSmall { q: u64, n: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("certificate check failed: {0}")]
    CheckFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
