use thiserror::Error;

use crate::lexer::Pos;

/// A diagnostic with the position it refers to.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DslError {
    #[error("{pos}: syntax error: {message}{}", expected_suffix(.expected))]
    Syntax {
        pos: Pos,
        message: String,
        expected: Vec<String>,
    },
    #[error("{pos}: type error: {message}")]
    Type { pos: Pos, message: String },
    #[error("{pos}: unknown identifier `{name}`")]
    UnknownIdentifier { pos: Pos, name: String },
    #[error("{pos}: {message}")]
    Invalid { pos: Pos, message: String },
}

fn expected_suffix(expected: &[String]) -> String {
    match expected {
        [] => String::new(),
        [one] => format!(" (expected {one})"),
        many => format!(" (expected one of {})", many.join(", ")),
    }
}

impl DslError {
    pub fn pos(&self) -> Pos {
        match self {
            DslError::Syntax { pos, .. }
            | DslError::Type { pos, .. }
            | DslError::UnknownIdentifier { pos, .. }
            | DslError::Invalid { pos, .. } => *pos,
        }
    }

    pub(crate) fn type_error(pos: Pos, message: impl Into<String>) -> Self {
        DslError::Type {
            pos,
            message: message.into(),
        }
    }
}
