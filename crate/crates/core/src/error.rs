use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("variable x{} out of range for {nvars} variables", .index + 1)]
    VariableOutOfRange { index: usize, nvars: usize },

    #[error("zero polynomial in input")]
    ZeroPolynomial,

    #[error("smt-lib: {0}")]
    Smt(String),

    #[error("invalid ordering: {0}")]
    InvalidOrdering(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
