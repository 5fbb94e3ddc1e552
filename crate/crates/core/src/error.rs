use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported field size {0}: q must be prime or 256")]
    UnsupportedField(u64),

    #[error("value {value} is not a canonical element of GF({q})")]
    ElementOutOfRange { value: u64, q: u32 },

    #[error("field mismatch: GF({0}) vs GF({1})")]
    FieldMismatch(u32, u32),

    #[error("shape mismatch: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("conflicting results for {cluster} block {block}")]
    InconsistentResponses { cluster: &'static str, block: usize },

    #[error("not decodable: missing untrusted blocks {missing_untrusted:?}, missing trusted blocks {missing_trusted:?} (1-indexed)")]
    Undecodable {
        missing_untrusted: Vec<usize>,
        missing_trusted: Vec<usize>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
