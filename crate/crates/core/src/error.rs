use thiserror::Error;

use crate::expr::ExprError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("missing input: {0}")]
    Missing(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("fields live on chart `{got}`, expected `{expected}`")]
    ChartMismatch { expected: String, got: String },
    #[error("point {point:?} violates domain constraint `{constraint}`")]
    OutsideDomain { point: Vec<f64>, constraint: String },
    #[error("metric is not positive definite at {point:?}")]
    NotPositiveDefinite { point: Vec<f64> },
    #[error("metric entries ({i},{j}) and ({j},{i}) differ at {point:?}")]
    AsymmetricMetric { i: usize, j: usize, point: Vec<f64> },
    #[error("critical point {point:?}: map Jacobian has rank {rank} < {required}")]
    CriticalPoint {
        point: Vec<f64>,
        rank: usize,
        required: usize,
    },
    #[error("frame `{name}` is not basic (projectable): pushforward varies by {deviation:.3e} along the fiber")]
    NonBasicFrame { name: String, deviation: f64 },
}

impl Error {
    /// Errors that disqualify a single sample point rather than the run.
    pub fn is_pointwise(&self) -> bool {
        matches!(
            self,
            Error::OutsideDomain { .. }
                | Error::NotPositiveDefinite { .. }
                | Error::CriticalPoint { .. }
                | Error::Expr(ExprError::Domain { .. })
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
