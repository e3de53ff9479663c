use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    /// Members of one collective call disagreed on its kind, root or shape.
    #[error("collective mismatch: {0}")]
    CollectiveMismatch(String),

    #[error("contract violation: {0}")]
    Contract(String),

    /// Every unfinished rank is blocked and no message can wake any of them.
    #[error("protocol error: ranks {waiting:?} are blocked on communication that can never complete")]
    Deadlock { waiting: Vec<usize> },

    /// Returned to surviving ranks once another rank has failed.
    #[error("run aborted after a failure on another rank")]
    Aborted,

    #[error("rank {rank} panicked: {message}")]
    RankPanic { rank: usize, message: String },

    /// A debug assertion (segment ordering, sortedness) failed during a run.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
