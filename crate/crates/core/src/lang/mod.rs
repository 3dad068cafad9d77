//! The MiniLang subject language: lexer, parser, renderer and interpreter.

mod ast;
mod error;
pub mod interp;
mod lexer;
mod parser;
mod render;
mod span;

pub use ast::*;
pub use error::ParseError;
pub use interp::{run_test_suite, LinkError, Suite, TestOutcome, Value, Verdict, DEFAULT_STEP_BUDGET};
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{parse_expr, parse_source, parse_stmt, BUILTINS};
pub use render::{quote, render_expr, render_source, render_stmt};
pub use span::{Pos, Span};
