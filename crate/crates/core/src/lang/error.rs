use alloc::string::String;
use alloc::vec::Vec;

use super::span::Pos;

fn join(items: &[String]) -> String {
    items.join(", ")
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{pos}: syntax error: unexpected {found}, expected one of: {}", join(.expected))]
    Syntax {
        pos: Pos,
        found: String,
        expected: Vec<String>,
    },
    #[error("{pos}: {message}")]
    Structure { pos: Pos, message: String },
}

impl ParseError {
    pub(crate) fn syntax(pos: Pos, found: String, expected: Vec<String>) -> Self {
        ParseError::Syntax {
            pos,
            found,
            expected,
        }
    }

    pub(crate) fn structure(pos: Pos, message: String) -> Self {
        ParseError::Structure { pos, message }
    }

    pub fn position(&self) -> Pos {
        match self {
            ParseError::Syntax { pos, .. } | ParseError::Structure { pos, .. } => *pos,
        }
    }

    pub fn is_structural(&self) -> bool {
        matches!(self, ParseError::Structure { .. })
    }
}
