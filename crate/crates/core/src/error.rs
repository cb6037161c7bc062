use thiserror::Error;

/// Errors produced anywhere in the pipeline.
///
/// Variants are grouped by the exit code the command-line front end maps
/// them to; see [`Error::exit_code`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("validation failed at ({i}, {j}): {msg}")]
    Validation {
        i: usize,
        j: usize,
        msg: String,
        cells: Vec<(usize, usize)>,
    },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("rank condition violated: expected corank {expected}, found {found}")]
    Rank { expected: usize, found: usize },

    #[error("modeling error: {0}")]
    Modeling(String),

    #[error("edge set contains a cycle: {0}")]
    CyclePresent(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("pole at the requested point: {0}")]
    Pole(String),

    #[error("numerically singular parameters: {0}")]
    SingularParameter(String),

    #[error("diagram invariant violated: {0}")]
    InvariantViolation(String),

    #[error("cycle classification failed: {0}")]
    Classification(String),

    #[error("confluence equations are inconsistent at level {level}: {msg}")]
    Unsolvable { level: usize, msg: String },

    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),

    #[error("top syzygy has dimension {0}, expected 1")]
    SyzygyDimension(usize),
}

impl Error {
    /// Process exit code used by the CLI: 2 for bad input, 3 for solver or
    /// confluence failures, 4 for numeric singularities and poles.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Malformed(_)
            | Error::Parse { .. }
            | Error::Validation { .. }
            | Error::Parameter(_)
            | Error::Precondition(_)
            | Error::Rank { .. }
            | Error::Modeling(_)
            | Error::CyclePresent(_) => 2,
            Error::InvariantViolation(_)
            | Error::Classification(_)
            | Error::Unsolvable { .. }
            | Error::InternalConsistency(_)
            | Error::SyzygyDimension(_) => 3,
            Error::DivisionByZero | Error::Pole(_) | Error::SingularParameter(_) => 4,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
