use thiserror::Error;

use crate::element::ElementId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("element {0} is not in the declared ground set")]
    UnknownElement(ElementId),

    #[error("element {0} is already alive")]
    AlreadyAlive(ElementId),

    #[error("element {0} is not alive")]
    NotAlive(ElementId),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid specification: {0}")]
    Validation(String),

    #[error("ground set of {n} elements exceeds the exhaustive-search limit of {limit}; use a greedy baseline instead")]
    TooLarge { n: usize, limit: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("event {position}: {msg}")]
    Stream { position: usize, msg: String },

    #[error("while applying event {index}: {source}")]
    AtEvent {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
