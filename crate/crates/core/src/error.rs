use thiserror::Error;

use crate::episode::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },

    #[error("invalid event-type symbol `{0}`")]
    InvalidSymbol(String),

    #[error("unknown event type `{0}`")]
    UnknownSymbol(String),

    #[error("event type `{0}` appears more than once in an episode")]
    DuplicateEventType(String),

    #[error("relation is not a strict partial order: {0}")]
    InvalidOrder(Violation),

    #[error("episode has {0} nodes, at most 64 are supported")]
    TooManyNodes(usize),

    #[error("episode must have at least one node")]
    EmptyEpisode,

    #[error("relation has size {relation} but {events} event types were given")]
    ShapeMismatch { events: usize, relation: usize },

    #[error("event stream is not sorted: tick {tick} at position {index} follows tick {prev}")]
    UnsortedStream { index: usize, tick: u64, prev: u64 },

    #[error("event id {0} is outside the stream alphabet")]
    EventOutOfRange(u32),

    #[error("candidate {index} has {found} nodes, expected {expected}")]
    SizeMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("episodes cannot be combined: {0}")]
    NotCombinable(&'static str),

    #[error("malformed block structure at index {0}")]
    MalformedBlocks(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("instance too large for brute-force enumeration: {0}")]
    TooLarge(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the error is a semantic validation failure (as opposed to a
    /// syntax or I/O problem). The CLI maps these to distinct exit codes.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::Syntax { .. } | Error::Io(_) | Error::InvalidSymbol(_)
        )
    }
}
