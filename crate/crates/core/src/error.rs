use thiserror::Error;

use crate::optimizer::Optimum;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A single queue driven at or past its service capacity.
///
/// Produced by the closed-form kernel, which has no notion of node names;
/// solvers attach the name when lifting it into [`Error::Saturated`].
#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("queue saturated at utilization {utilization}")]
pub struct Saturation {
    pub utilization: f64,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("node `{node}` is saturated (utilization {utilization:.6} >= 1)")]
    Saturated { node: String, utilization: f64 },

    #[error("queue length undefined for utilization {0} (requires 0 <= rho < 1)")]
    Domain(f64),

    #[error("invalid {field}: {constraint}")]
    Invalid {
        field: &'static str,
        constraint: String,
    },

    #[error("queue {index} is unstable under this routing (load {load:.6} >= 1)")]
    Unstable { index: usize, load: f64 },

    #[error("arrival rate {rate} exceeds the array capacity {capacity} (sum of 1/S_k)")]
    Infeasible { rate: f64, capacity: f64 },

    #[error("optimizer did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        best: Box<Optimum>,
    },

    #[error("transform requires {expected}")]
    Topology { expected: &'static str },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("event clock overflowed at t = {0}")]
    ClockOverflow(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, constraint: impl Into<String>) -> Self {
        Error::Invalid {
            field,
            constraint: constraint.into(),
        }
    }

    /// Process exit status for the command-line front end.
    ///
    /// 1 validation or parse, 2 saturation or infeasibility, 3 non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Saturated { .. }
            | Error::Unstable { .. }
            | Error::Infeasible { .. }
            | Error::Domain(_) => 2,
            Error::NotConverged { .. } => 3,
            Error::Invalid { .. }
            | Error::Topology { .. }
            | Error::Parse { .. }
            | Error::ClockOverflow(_)
            | Error::Io(_) => 1,
        }
    }
}
