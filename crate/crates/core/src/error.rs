use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("synthesis failed: {0}")]
    Synthesis(String),
    #[error("decomposition failed: {0}")]
    Decomposition(String),
    #[error("block `{block}`: {source}")]
    Block {
        block: String,
        #[source]
        source: Box<Error>,
    },
    #[error("integration failed: {0}")]
    Integration(String),
    #[error("reconstruction failed: {0}")]
    Reconstruction(String),
    #[error("schema error: {0}")]
    Schema(String),
}

impl Error {
    pub(crate) fn in_block(self, block: impl Into<String>) -> Self {
        Error::Block {
            block: block.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, with block tags stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Block { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
