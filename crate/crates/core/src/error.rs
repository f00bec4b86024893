use thiserror::Error;

use crate::instance::ValidationReport;
use crate::lp::Cut;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("instance is malformed: {0}")]
    Validation(ValidationReport),

    #[error("precedence relation contains a cycle through jobs {witness:?}")]
    Cycle { witness: Vec<usize> },

    #[error("job {job} has zero processing time; remove it or merge it into a neighbouring job")]
    ZeroProcessing { job: usize },

    #[error("schedule is infeasible: {0}")]
    Infeasible(String),

    #[error("epsilon {epsilon} is out of range: need 0 < epsilon <= 3/ln 3 so that consecutive breakpoints are at least a factor 3 apart")]
    EpsilonOutOfRange { epsilon: f64 },

    #[error("offset b = {b} is outside [0, {a}]")]
    OffsetOutOfRange { b: f64, a: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cutting-plane loop hit its cap of {cap} rounds; most violated remaining cut {cut:?}")]
    LpIterationCap { cap: usize, cut: Cut },

    #[error("linear program is infeasible (numerical trouble in the simplex)")]
    LpInfeasible,

    #[error("exhaustive separation supports at most {cap} jobs, got {n}; use the fast separation oracle")]
    SeparationTooLarge { n: usize, cap: usize },

    #[error("exact oracle supports at most {cap} jobs, got {n}")]
    OracleTooLarge { n: usize, cap: usize },

    #[error("exhaustive guessing on {n} jobs needs a guess budget (or use the typed mode)")]
    GuessBudgetRequired { n: usize },

    #[error("every guess failed; last error: {0}")]
    AllGuessesFailed(Box<Error>),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("instance {digest}: {source}")]
    Run { digest: String, source: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invariant(_) => 3,
            Error::Run { source, .. } => source.exit_code(),
            Error::InvalidParameter(_)
            | Error::EpsilonOutOfRange { .. }
            | Error::OffsetOutOfRange { .. }
            | Error::SeparationTooLarge { .. }
            | Error::OracleTooLarge { .. }
            | Error::GuessBudgetRequired { .. }
            | Error::Io(_) => 1,
            _ => 2,
        }
    }
}
