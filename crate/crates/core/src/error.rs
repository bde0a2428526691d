use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no fence spacing yields a valid perimeter ring for epsilon {0}")]
    FenceInfeasible(f64),
    #[error("edge set is not a 1-cycle: {0}")]
    NotACycle(String),
    #[error("fence does not induce a single 1-circuit")]
    InvalidFence,
    #[error("unknown label: {0}")]
    UnknownLabel(String),
    #[error("matrix entry outside {{-1, 0, 1}}: {0}")]
    EntryOutOfRange(String),
    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),
    #[error("catalog entry `{0}` is not loaded")]
    CatalogMissing(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
