use thiserror::Error;

/// Coarse classification used by the CLI exit-code contract and the C ABI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Invalid,
    Convergence,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error(
        "quadrature did not reach tolerance after {subdivisions} subdivisions \
         (estimate {estimate:e}, error estimate {abs_error:e})"
    )]
    QuadratureNonConvergence {
        estimate: f64,
        abs_error: f64,
        subdivisions: usize,
    },

    #[error(
        "thermalization stroke not within epsilon after {windows} coupling windows \
         (best distance {best_distance:e})"
    )]
    StrokeNonConvergence { windows: usize, best_distance: f64 },

    #[error("transition rates vanish at omega = {omega}: bath spectrum is fully detuned")]
    ZeroRates { omega: f64 },

    #[error("limit cycle did not close after {cycles} cycles (residual {residual:e})")]
    LimitCycleOpen { cycles: usize, residual: f64 },

    #[error("efficiency undefined: Q_h = 0")]
    UndefinedEfficiency,

    #[error("coefficient of performance undefined: zero net work input")]
    UndefinedCop,

    #[error("no sweep row converged ({rows} attempted)")]
    SweepFailed { rows: usize },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidParameter { .. } => ErrorKind::Invalid,
            Error::QuadratureNonConvergence { .. } => ErrorKind::Quadrature,
            Error::StrokeNonConvergence { .. }
            | Error::ZeroRates { .. }
            | Error::LimitCycleOpen { .. }
            | Error::SweepFailed { .. } => ErrorKind::Convergence,
            Error::UndefinedEfficiency | Error::UndefinedCop => ErrorKind::Invalid,
        }
    }

    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
