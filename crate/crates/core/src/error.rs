use thiserror::Error;

/// Errors raised by the law algebra, the Borel routines and the bound calculators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("negative probability mass {value} at index {index}")]
    NegativeMass { index: u64, value: f64 },
    #[error("law is not normalized: total mass {total}")]
    NotNormalized { total: f64 },
    #[error("mixture weight {0} outside [0, 1]")]
    WeightOutOfRange(f64),
    #[error("empirical law needs at least one sample")]
    EmptySample,
    #[error("invalid support index {0}; laws live on 1, 2, ...")]
    InvalidIndex(u64),
    #[error("lambda must lie strictly inside (0, 1), got {0}")]
    InvalidLambda(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("truncation window would exceed the cap of {cap} (lambda too close to 1 for the requested eps)")]
    WindowOverflow { cap: usize },
    #[error("tail mass {tail_mass} too large to size bias (limit {limit})")]
    UnresolvedTail { tail_mass: f64, limit: f64 },
    #[error("index {index} lies outside the solved window 1..={window}")]
    InsufficientWindow { index: u64, window: u64 },
    #[error("mean {observed} does not match the required {expected}")]
    MeanMismatch { observed: f64, expected: f64 },
    #[error("lambda {0} is outside the range where this bound applies (needs lambda < 1/2)")]
    LambdaOutOfRange(f64),
    #[error("delta {delta} infeasible: needs 0 < delta < {limit}")]
    DeltaOutOfRange { delta: f64, limit: f64 },
    #[error("quadrature did not reach tolerance {tol} (estimated error {err})")]
    QuadratureFailure { tol: f64, err: f64 },
    #[error("series terms still not decreasing at index {0}")]
    SumDivergenceGuard(u64),
}

pub type Result<T> = std::result::Result<T, Error>;
