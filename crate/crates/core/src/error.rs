use thiserror::Error;

/// Errors raised by the workbench.
///
/// Search exhaustion and budget exhaustion are not errors; they are
/// reported through the search outcome types.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("row support reaches column {column} but matrix width is {width}")]
    SupportOutOfRange { column: usize, width: usize },

    #[error("duplicate row {0} in a matrix that does not allow duplicates")]
    DuplicateRow(usize),

    #[error("sequence has no nonzero term")]
    AllZeroSequence,

    #[error("{0} is not a compressed sequence")]
    NotCompressed(String),

    #[error("width {width} too small, need at least {needed}")]
    WidthTooSmall { needed: usize, width: usize },

    #[error("zero has no digit support")]
    ZeroValue,

    #[error("digit support too small: max support {max_supp}, need at least {needed}")]
    SupportTooSmall { max_supp: usize, needed: usize },

    #[error("value {0} is not a positive integer")]
    NotPositiveInteger(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("vector is constant; no refuting row exists")]
    ConstantVector,

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
