use thiserror::Error;

use crate::density::DensityKind;

/// Errors raised by the estimators, optimizer and file readers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid return parameters: {0}")]
    InvalidParams(String),

    #[error("perfectly correlated legs: stock and bond variance difference is not positive")]
    PerfectlyCorrelated,

    #[error("division by non-positive v' at alpha={alpha}: the ratio must exceed the minimum-variance ratio {mva}")]
    NonPositiveSlope { alpha: f64, mva: f64 },

    #[error("Hessian diagonal element does not exist for alpha value={alpha:.10} encountered at time point t={t}")]
    SingularTheta { alpha: f64, t: usize },

    #[error("moment order {0} is outside 1..=4")]
    MomentOrder(u32),

    #[error("invalid density selector: {0}")]
    InvalidSelector(String),

    #[error("invalid discretization: {0}")]
    InvalidGrid(String),

    #[error("time point t={t} has ruin probability {value} < 1 in the last bucket (increase rf_max)")]
    IncreaseRfMax { t: usize, value: f64 },

    #[error("ruin probabilities at time point t={t} are inconsistent near bucket {bucket}: {prev} then {value}")]
    NonMonotone { t: usize, bucket: usize, prev: f64, value: f64 },

    #[error(
        "rejection envelope violated for {kind:?} density at alpha={alpha}: pdf {pdf} exceeds box height {height}"
    )]
    Envelope { kind: DensityKind, alpha: f64, pdf: f64, height: f64 },

    #[error("sample size must be at least 1")]
    EmptySample,

    #[error(
        "no progress can be made, the procedure is stuck (step size has been reduced to 0); you may be operating \
         along the boundary where the process is not well defined or your estimation precision is not adequate \
         for your epsilon level"
    )]
    Stuck { glidepath: Vec<f64>, probability: f64 },

    #[error(
        "Newton's method is not defined on the boundary: ratio t={t} is pinned at {bound} with gradient {gradient:e} \
         pointing outward; use gradient ascent (ga)"
    )]
    Boundary { t: usize, bound: f64, gradient: f64 },

    #[error("Hessian is singular or ill-conditioned (condition estimate {condition:e}); use gradient ascent (ga)")]
    IllConditioned { condition: f64 },

    #[error("no convergence after {iterations} iterations (max effective gradient {max_effective:e})")]
    NotConverged { iterations: usize, max_effective: f64, glidepath: Vec<f64>, probability: f64 },

    #[error("invalid mortality distribution: {0}")]
    InvalidMortality(String),

    #[error("{0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

pub type Result<T> = std::result::Result<T, Error>;
