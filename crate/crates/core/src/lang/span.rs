use core::fmt;

use serde::{Deserialize, Serialize};

/// 1-based line and byte column.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A half-open byte range into a module's source text, with the line/column
/// of both ends.
///
/// Spans compare equal to each other unconditionally so that derived
/// equality on AST nodes is structural. Use [`Span::same_location`] when the
/// location itself matters.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub start_pos: Pos,
    pub end_pos: Pos,
}

impl PartialEq for Span {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

impl Eq for Span {}

impl Span {
    /// Placeholder for nodes that were built in memory rather than parsed.
    pub const DUMMY: Span = Span {
        start: 0,
        end: 0,
        start_pos: Pos { line: 0, col: 0 },
        end_pos: Pos { line: 0, col: 0 },
    };

    pub fn is_dummy(&self) -> bool {
        self.start_pos.line == 0
    }

    pub fn same_location(&self, other: &Span) -> bool {
        self.start == other.start && self.end == other.end
    }

    pub fn to(&self, other: &Span) -> Span {
        Span {
            start: self.start,
            end: other.end,
            start_pos: self.start_pos,
            end_pos: other.end_pos,
        }
    }

    pub fn line(&self) -> u32 {
        self.start_pos.line
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start_pos, self.end_pos)
    }
}
