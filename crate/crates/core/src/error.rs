//! Error type shared across the engine. Verification *failures* are data
//! (certificates), not errors; errors are malformed input, violated
//! preconditions, or infeasible solves.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("division by zero")]
    DivisionByZero,

    #[error("cannot parse scalar literal `{0}`")]
    ScalarSyntax(String),

    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("semantic error: {0}")]
    Semantic(String),

    #[error("forms belong to different algebras ({0} vs {1})")]
    MismatchedAlgebras(String, String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("operation requires a complex parallelisable algebra (B = 0); `{0}` is not")]
    NotParallelisable(String),

    #[error("linear system infeasible: {0}")]
    Infeasible(String),

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for CoreError {
    fn from(e: std::io::Error) -> Self {
        CoreError::Io(e.to_string())
    }
}
