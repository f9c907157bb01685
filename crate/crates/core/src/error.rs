use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("record {record} (doc {doc_id:?}): {reason}")]
    MalformedRecord {
        doc_id: String,
        record: usize,
        reason: String,
    },
    #[error("duplicate doc id {0:?}")]
    DuplicateDoc(String),
    #[error("duplicate vocabulary surface {0:?}")]
    DuplicateSurface(String),
    #[error("doc {doc_id:?}: token id {token} out of range for vocabulary of size {vocab_len}")]
    TokenOutOfRange {
        doc_id: String,
        token: u32,
        vocab_len: usize,
    },
    #[error("doc {doc_id:?}: zero count for token {token}")]
    ZeroCount { doc_id: String, token: u32 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("not a probability vector: {0}")]
    NotNormalized(String),
    #[error("topic {0} has zero total responsibility and smoothing is 0")]
    DegenerateTopic(usize),
    #[error("corpus has no tokens to fit")]
    EmptyCorpus,
    #[error("count matrices inconsistent with assignments: {0}")]
    InconsistentState(String),
    #[error("label {0:?} is not in the requested label order")]
    UnknownLabel(String),
    #[error("contingency table is empty")]
    EmptyTable,
}

impl Error {
    /// True for failures of the numerical procedure itself rather than of
    /// its inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateTopic(_) | Error::InconsistentState(_) | Error::NotNormalized(_)
        )
    }
}
