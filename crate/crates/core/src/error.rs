use thiserror::Error;

use crate::model::Decision;

pub type Result<T, E = CflError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CflError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    /// A numeric routine failed to converge. Carries the best iterate when one exists.
    #[error("numeric failure: {message}")]
    Numeric {
        message: String,
        best: Option<Decision>,
    },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CflError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        CflError::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        CflError::Numeric {
            message: msg.into(),
            best: None,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        CflError::Config(msg.into())
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(CflError::Dimension { expected, got })
    }
}
