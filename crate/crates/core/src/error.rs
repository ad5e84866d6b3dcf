use thiserror::Error;

use crate::graph::AgentId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid world config: {0}")]
    Config(String),

    #[error("{count} agents do not fit on a dense circle of radius {radius} (capacity {capacity})")]
    Capacity {
        count: usize,
        radius: f64,
        capacity: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("agents {a} and {b} overlap (distance {distance})")]
    Overlap { a: AgentId, b: AgentId, distance: f64 },

    #[error("agent {0} is not a member of the component")]
    NotMember(AgentId),

    #[error("agent {0} is already conquered")]
    AlreadyConquered(AgentId),

    #[error("decision rule violated the conquest protocol: {0}")]
    Protocol(String),

    #[error("invalid attacking sequence: {0}")]
    Sequence(String),

    #[error("component of {0} agents is too large for exhaustive search")]
    TooLarge(usize),

    #[error("placement failed: {0}")]
    Placement(String),

    #[error("agent memory is inconsistent: {0}")]
    Memory(String),

    #[error("unknown strategy {0:?}")]
    UnknownStrategy(String),

    #[error("degenerate sample: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the CLI: 2 for I/O failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) | Error::Csv(_) => 2,
            _ => 1,
        }
    }
}
