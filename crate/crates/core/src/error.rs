use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// One failed check, addressed by its dotted path in the parameter tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

impl FieldError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`: {}", self.path, self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter {0}")]
    InvalidParameter(FieldError),

    #[error("{} invalid parameter(s): {}", .0.len(), join(.0))]
    Validation(Vec<FieldError>),

    #[error("malformed parameter JSON at `{path}`: {message}")]
    Json { path: String, message: String },

    #[error("image is empty")]
    EmptyImage,
}

impl Error {
    pub fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self::InvalidParameter(FieldError::new(path, message))
    }

    /// Field-level view of the error, used for structured error bodies.
    pub fn field_errors(&self) -> Vec<FieldError> {
        match self {
            Self::InvalidParameter(e) => vec![e.clone()],
            Self::Validation(list) => list.clone(),
            Self::Json { path, message } => vec![FieldError::new(path.clone(), message.clone())],
            Self::EmptyImage => vec![FieldError::new("image", "image is empty")],
        }
    }
}

fn join(errors: &[FieldError]) -> String {
    errors.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
