use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    /// A stimulus line could not be parsed or refers to something invalid.
    #[error("stimulus line {line}: {message}")]
    Stimulus { line: usize, message: String },

    #[error("invalid simulator configuration: {0}")]
    Config(String),

    /// A word that violates the wire format.
    #[error("protocol error: {0}")]
    Protocol(String),
}

pub type Result<T> = std::result::Result<T, SimError>;
