//! Mutation point discovery and the five mutation operators.

mod apply;
mod discover;
mod suppress;
pub mod types;

use alloc::string::String;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::lang::{BinaryOp, Span};

pub use apply::{
    applicable_operators, apply_operator, enumerate_all_mutants, enumerate_with_rejections,
    mutant_id, Mutator, Rejection,
};
pub use discover::discover_points;
pub use suppress::{glob_match, is_suppressed, SuppressionConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OperatorKind {
    #[serde(rename = "AOR")]
    Aor,
    #[serde(rename = "LCR")]
    Lcr,
    #[serde(rename = "ROR")]
    Ror,
    #[serde(rename = "UOI")]
    Uoi,
    #[serde(rename = "SBR")]
    Sbr,
}

impl OperatorKind {
    /// Fixed order, also used for tie-breaking.
    pub const ALL: [OperatorKind; 5] = [
        OperatorKind::Aor,
        OperatorKind::Lcr,
        OperatorKind::Ror,
        OperatorKind::Uoi,
        OperatorKind::Sbr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Aor => "AOR",
            OperatorKind::Lcr => "LCR",
            OperatorKind::Ror => "ROR",
            OperatorKind::Uoi => "UOI",
            OperatorKind::Sbr => "SBR",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    BinaryArith,
    BinaryLogical,
    BinaryRelational,
    BoolExpr,
    NumExpr,
    Statement,
}

impl NodeKind {
    pub const ALL: [NodeKind; 6] = [
        NodeKind::BinaryArith,
        NodeKind::BinaryLogical,
        NodeKind::BinaryRelational,
        NodeKind::BoolExpr,
        NodeKind::NumExpr,
        NodeKind::Statement,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NodeKind::BinaryArith => "BinaryArith",
            NodeKind::BinaryLogical => "BinaryLogical",
            NodeKind::BinaryRelational => "BinaryRelational",
            NodeKind::BoolExpr => "BoolExpr",
            NodeKind::NumExpr => "NumExpr",
            NodeKind::Statement => "Statement",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Statement classes relevant to SBR.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StmtClass {
    Let,
    Assign,
    If,
    While,
    Return,
    Break,
    Continue,
    Expr,
}

/// What the operators need to know about the node under a point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointDetail {
    Binary { op: BinaryOp, op_span: Span },
    /// A typed expression: UOI inserts `!` or `-` in front of it.
    Typed {
        needs_parens: bool,
        /// The expression is already negated by the same operator, or sits
        /// directly under one.
        double_negation: bool,
    },
    Statement { class: StmtClass },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutationPoint {
    pub path: String,
    pub line: u32,
    pub span: Span,
    pub node_kind: NodeKind,
    pub original_snippet: String,
    pub detail: PointDetail,
    /// Callee of the outermost call enclosing (or being) this node within
    /// its statement.
    pub enclosing_callee: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum MutantStatus {
    #[default]
    Unknown,
    Live,
    Killed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mutant {
    pub id: String,
    pub point: MutationPoint,
    pub operator: OperatorKind,
    pub variant: usize,
    pub replacement_snippet: String,
    /// Full text of the mutated file. Not serialized; rebuild it with
    /// [`Mutant::splice`].
    #[serde(skip)]
    pub mutated_source: String,
    pub status: MutantStatus,
}

impl Mutant {
    pub fn line(&self) -> u32 {
        self.point.line
    }

    pub fn column(&self) -> u32 {
        self.point.span.start_pos.col
    }

    /// Rebuilds the mutated text from the original source.
    pub fn splice(&self, original_source: &str) -> String {
        let span = &self.point.span;
        let mut out = String::with_capacity(original_source.len() + self.replacement_snippet.len());
        out.push_str(&original_source[..span.start]);
        out.push_str(&self.replacement_snippet);
        out.push_str(&original_source[span.end..]);
        out
    }
}

/// Why an operator could not be applied at a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NotApplicable {
    /// The operator does not act on this node kind, or the variant index is
    /// outside the operator table.
    WrongNodeKind,
    ControlFlowStatement,
    Declaration,
    WouldNotParse,
    Suppressed,
    /// UOI would stack a second identical unary operator.
    DoubleNegation,
}

impl fmt::Display for NotApplicable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NotApplicable::WrongNodeKind => "wrong node kind",
            NotApplicable::ControlFlowStatement => "control-flow statement",
            NotApplicable::Declaration => "declaration",
            NotApplicable::WouldNotParse => "would not parse",
            NotApplicable::Suppressed => "suppressed",
            NotApplicable::DoubleNegation => "double negation",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum MutagenError {
    #[error("the eligible line set must not be empty")]
    EmptyLineSet,
}
