use alloc::string::String;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("malformed author mention {0:?}")]
    MalformedMention(String),
    #[error("unknown publication {0:?}")]
    UnknownPublication(String),
    #[error("record {record:?} carries two gold authors ({first}, {second}) in block {block:?}")]
    GoldConflict {
        block: String,
        record: String,
        first: String,
        second: String,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("modularity is undefined for a graph without edges")]
    UndefinedModularity,
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
