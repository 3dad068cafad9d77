use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use alloc::format;

use super::ast::*;
use super::error::ParseError;
use super::lexer::{tokenize, Token, TokenKind};
use super::span::Span;

/// Names reserved for interpreter builtins.
pub const BUILTINS: [&str; 4] = ["print", "log", "assert_true", "assert_eq"];

const EXPR_START: [&str; 8] = [
    "identifier",
    "integer",
    "string",
    "\"true\"",
    "\"false\"",
    "\"(\"",
    "\"-\"",
    "\"!\"",
];

/// Parses a whole module and checks its structural rules (unique function
/// and parameter names, `break`/`continue` only inside loops).
pub fn parse_source(text: &str, path: &str) -> Result<SubjectModule, ParseError> {
    let mut p = Parser::new(text)?;
    let mut functions = Vec::new();
    let mut names = BTreeSet::new();
    while !p.at(&TokenKind::Eof) {
        let f = p.function()?;
        if BUILTINS.contains(&f.name.name.as_str()) {
            return Err(ParseError::structure(
                f.name.span.start_pos,
                format!("function `{}` shadows a builtin", f.name.name),
            ));
        }
        if !names.insert(f.name.name.clone()) {
            return Err(ParseError::structure(
                f.name.span.start_pos,
                format!("duplicate function name `{}`", f.name.name),
            ));
        }
        functions.push(f);
    }
    Ok(SubjectModule {
        path: String::from(path),
        source_text: String::from(text),
        functions,
    })
}

/// Parses a single expression spanning all of `text`.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

/// Parses a single statement spanning all of `text`. Loop-context rules are
/// not checked, so a lone `break;` is accepted.
pub fn parse_stmt(text: &str) -> Result<Stmt, ParseError> {
    let mut p = Parser::new(text)?;
    p.loop_depth = 1;
    let s = p.stmt()?;
    p.expect_eof()?;
    Ok(s)
}

struct Parser {
    tokens: Vec<Token>,
    idx: usize,
    loop_depth: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            tokens: tokenize(text)?,
            idx: 0,
            loop_depth: 0,
        })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.idx]
    }

    fn peek_kind_at(&self, n: usize) -> &TokenKind {
        let i = (self.idx + n).min(self.tokens.len() - 1);
        &self.tokens[i].kind
    }

    fn at(&self, kind: &TokenKind) -> bool {
        &self.peek().kind == kind
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.idx].clone();
        if self.idx + 1 < self.tokens.len() {
            self.idx += 1;
        }
        t
    }

    fn prev_span(&self) -> Span {
        self.tokens[self.idx.saturating_sub(1)].span
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let t = self.peek();
        ParseError::syntax(
            t.span.start_pos,
            t.kind.describe(),
            expected.iter().map(|s| String::from(*s)).collect(),
        )
    }

    fn expect(&mut self, kind: TokenKind) -> Result<Token, ParseError> {
        if self.at(&kind) {
            Ok(self.bump())
        } else {
            let want = format!("\"{}\"", kind.text());
            Err(self.unexpected(&[want.as_str()]))
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        if self.at(&TokenKind::Eof) {
            Ok(())
        } else {
            Err(self.unexpected(&["end of input"]))
        }
    }

    fn ident(&mut self) -> Result<Ident, ParseError> {
        match &self.peek().kind {
            TokenKind::Ident(name) => {
                let name = name.clone();
                let span = self.bump().span;
                Ok(Ident { name, span })
            }
            _ => Err(self.unexpected(&["identifier"])),
        }
    }

    fn function(&mut self) -> Result<FunctionDef, ParseError> {
        let start = self.expect(TokenKind::Fn)?.span;
        let name = self.ident()?;
        self.expect(TokenKind::LParen)?;
        let mut params: Vec<Ident> = Vec::new();
        if !self.at(&TokenKind::RParen) {
            loop {
                if !matches!(self.peek().kind, TokenKind::Ident(_)) {
                    return Err(self.unexpected(&["identifier", "\")\""]));
                }
                let p = self.ident()?;
                if params.iter().any(|q| q.name == p.name) {
                    return Err(ParseError::structure(
                        p.span.start_pos,
                        format!("duplicate parameter `{}` in `{}`", p.name, name.name),
                    ));
                }
                params.push(p);
                if self.at(&TokenKind::Comma) {
                    self.bump();
                } else if self.at(&TokenKind::RParen) {
                    break;
                } else {
                    return Err(self.unexpected(&["\",\"", "\")\""]));
                }
            }
        }
        self.expect(TokenKind::RParen)?;
        let body = self.block()?;
        let span = start.to(&body.span);
        Ok(FunctionDef {
            name,
            params,
            body,
            span,
        })
    }

    fn block(&mut self) -> Result<Block, ParseError> {
        let start = self.expect(TokenKind::LBrace)?.span;
        let mut stmts = Vec::new();
        while !self.at(&TokenKind::RBrace) {
            if self.at(&TokenKind::Eof) {
                return Err(self.unexpected(&["statement", "\"}\""]));
            }
            stmts.push(self.stmt()?);
        }
        let end = self.bump().span;
        Ok(Block {
            stmts,
            span: start.to(&end),
        })
    }

    fn semi(&mut self, start: Span, kind: StmtKind) -> Result<Stmt, ParseError> {
        let end = self.expect(TokenKind::Semi)?.span;
        Ok(Stmt {
            kind,
            span: start.to(&end),
        })
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        let start = self.peek().span;
        match self.peek().kind.clone() {
            TokenKind::Let => {
                self.bump();
                let name = self.ident()?;
                self.expect(TokenKind::Assign)?;
                let value = self.expr()?;
                self.semi(start, StmtKind::Let { name, value })
            }
            TokenKind::Ident(_) if self.peek_kind_at(1) == &TokenKind::Assign => {
                let target = self.ident()?;
                self.bump();
                let value = self.expr()?;
                self.semi(start, StmtKind::Assign { target, value })
            }
            TokenKind::If => self.if_stmt(),
            TokenKind::While => {
                self.bump();
                self.expect(TokenKind::LParen)?;
                let cond = self.expr()?;
                self.expect(TokenKind::RParen)?;
                self.loop_depth += 1;
                let body = self.block();
                self.loop_depth -= 1;
                let body = body?;
                let span = start.to(&body.span);
                Ok(Stmt {
                    kind: StmtKind::While { cond, body },
                    span,
                })
            }
            TokenKind::Return => {
                self.bump();
                let value = if self.at(&TokenKind::Semi) {
                    None
                } else {
                    Some(self.expr()?)
                };
                self.semi(start, StmtKind::Return(value))
            }
            TokenKind::Break | TokenKind::Continue => {
                let tok = self.bump();
                if self.loop_depth == 0 {
                    return Err(ParseError::structure(
                        tok.span.start_pos,
                        format!("`{}` outside of a loop", tok.kind.text()),
                    ));
                }
                let kind = if tok.kind == TokenKind::Break {
                    StmtKind::Break
                } else {
                    StmtKind::Continue
                };
                self.semi(start, kind)
            }
            TokenKind::Ident(_)
            | TokenKind::Int(_)
            | TokenKind::Str(_)
            | TokenKind::True
            | TokenKind::False
            | TokenKind::LParen
            | TokenKind::Minus
            | TokenKind::Bang => {
                let e = self.expr()?;
                self.semi(start, StmtKind::Expr(e))
            }
            _ => Err(self.unexpected(&[
                "statement",
                "\"let\"",
                "\"if\"",
                "\"while\"",
                "\"return\"",
                "\"break\"",
                "\"continue\"",
                "expression",
            ])),
        }
    }

    fn if_stmt(&mut self) -> Result<Stmt, ParseError> {
        let start = self.expect(TokenKind::If)?.span;
        self.expect(TokenKind::LParen)?;
        let cond = self.expr()?;
        self.expect(TokenKind::RParen)?;
        let then_block = self.block()?;
        let mut end = then_block.span;
        let else_branch = if self.at(&TokenKind::Else) {
            self.bump();
            if self.at(&TokenKind::If) {
                let nested = self.if_stmt()?;
                end = nested.span;
                Some(ElseBranch::If(Box::new(nested)))
            } else if self.at(&TokenKind::LBrace) {
                let b = self.block()?;
                end = b.span;
                Some(ElseBranch::Block(b))
            } else {
                return Err(self.unexpected(&["\"{\"", "\"if\""]));
            }
        } else {
            None
        };
        Ok(Stmt {
            kind: StmtKind::If {
                cond,
                then_block,
                else_branch,
            },
            span: start.to(&end),
        })
    }

    pub fn expr(&mut self) -> Result<Expr, ParseError> {
        self.binary(1)
    }

    fn binary_op(&self) -> Option<BinaryOp> {
        Some(match self.peek().kind {
            TokenKind::OrOr => BinaryOp::Or,
            TokenKind::AndAnd => BinaryOp::And,
            TokenKind::EqEq => BinaryOp::Eq,
            TokenKind::NotEq => BinaryOp::Ne,
            TokenKind::Lt => BinaryOp::Lt,
            TokenKind::Le => BinaryOp::Le,
            TokenKind::Gt => BinaryOp::Gt,
            TokenKind::Ge => BinaryOp::Ge,
            TokenKind::Plus => BinaryOp::Add,
            TokenKind::Minus => BinaryOp::Sub,
            TokenKind::Star => BinaryOp::Mul,
            TokenKind::Slash => BinaryOp::Div,
            TokenKind::Percent => BinaryOp::Rem,
            _ => return None,
        })
    }

    /// Precedence climbing; all binary operators are left-associative.
    fn binary(&mut self, min_prec: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binary_op() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            let op_span = self.bump().span;
            let rhs = self.binary(prec + 1)?;
            let span = lhs.span.to(&rhs.span);
            lhs = Expr {
                kind: ExprKind::Binary {
                    op,
                    op_span,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                span,
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let op = match self.peek().kind {
            TokenKind::Minus => UnaryOp::Neg,
            TokenKind::Bang => UnaryOp::Not,
            _ => return self.primary(),
        };
        let start = self.bump().span;
        let operand = self.unary()?;
        let span = start.to(&operand.span);
        Ok(Expr {
            kind: ExprKind::Unary {
                op,
                operand: Box::new(operand),
            },
            span,
        })
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let tok = self.peek().clone();
        let kind = match tok.kind {
            TokenKind::Int(v) => ExprKind::Int(v),
            TokenKind::Str(s) => ExprKind::Str(s),
            TokenKind::True => ExprKind::Bool(true),
            TokenKind::False => ExprKind::Bool(false),
            TokenKind::Ident(name) => {
                if self.peek_kind_at(1) == &TokenKind::LParen {
                    return self.call();
                }
                ExprKind::Var(name)
            }
            TokenKind::LParen => {
                self.bump();
                let inner = self.expr()?;
                let end = self.expect(TokenKind::RParen)?.span;
                return Ok(Expr {
                    kind: ExprKind::Paren(Box::new(inner)),
                    span: tok.span.to(&end),
                });
            }
            _ => return Err(self.unexpected(&EXPR_START)),
        };
        self.bump();
        Ok(Expr {
            kind,
            span: tok.span,
        })
    }

    fn call(&mut self) -> Result<Expr, ParseError> {
        let callee = self.ident()?;
        self.expect(TokenKind::LParen)?;
        let mut args = Vec::new();
        if !self.at(&TokenKind::RParen) {
            loop {
                args.push(self.expr()?);
                if self.at(&TokenKind::Comma) {
                    self.bump();
                } else if self.at(&TokenKind::RParen) {
                    break;
                } else {
                    return Err(self.unexpected(&["\",\"", "\")\""]));
                }
            }
        }
        self.bump();
        let span = callee.span.to(&self.prev_span());
        Ok(Expr {
            kind: ExprKind::Call { callee, args },
            span,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::span::Pos;

    #[test]
    fn empty_input_has_no_functions() {
        let m = parse_source("", "a.mini").unwrap();
        assert!(m.functions.is_empty());
    }

    #[test]
    fn minimal_program() {
        let m = parse_source("fn main() { return 1; }", "a.mini").unwrap();
        assert_eq!(m.functions.len(), 1);
        let body = &m.functions[0].body.stmts;
        assert_eq!(body.len(), 1);
        assert!(matches!(body[0].kind, StmtKind::Return(Some(_))));
    }

    #[test]
    fn malformed_params_report_brace() {
        let err = parse_source("fn f( {", "a.mini").unwrap_err();
        match err {
            ParseError::Syntax {
                pos,
                found,
                expected,
            } => {
                assert_eq!(pos, Pos { line: 1, col: 7 });
                assert!(found.contains('{'), "{found}");
                assert!(expected.iter().any(|e| e == "identifier"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn break_outside_loop_is_structural() {
        let err = parse_source("fn f() { break; }", "a.mini").unwrap_err();
        assert!(err.is_structural());
        assert!(parse_source("fn f() { while (true) { if (true) { break; } } }", "a").is_ok());
    }

    #[test]
    fn duplicate_names_rejected() {
        assert!(parse_source("fn f() {} fn f() {}", "a").unwrap_err().is_structural());
        assert!(parse_source("fn f(a, a) {}", "a").unwrap_err().is_structural());
        assert!(parse_source("fn log(a) {}", "a").unwrap_err().is_structural());
    }

    #[test]
    fn precedence_and_associativity() {
        let e = parse_expr("a - b - c * d").unwrap();
        let ExprKind::Binary { op, lhs, rhs, .. } = e.kind else {
            panic!()
        };
        assert_eq!(op, BinaryOp::Sub);
        assert!(matches!(lhs.kind, ExprKind::Binary { op: BinaryOp::Sub, .. }));
        assert!(matches!(rhs.kind, ExprKind::Binary { op: BinaryOp::Mul, .. }));

        let e = parse_expr("a || b && c == d < e").unwrap();
        let ExprKind::Binary { op, rhs, .. } = e.kind else {
            panic!()
        };
        assert_eq!(op, BinaryOp::Or);
        let ExprKind::Binary { op, rhs, .. } = rhs.kind else {
            panic!()
        };
        assert_eq!(op, BinaryOp::And);
        let ExprKind::Binary { op, rhs, .. } = rhs.kind else {
            panic!()
        };
        assert_eq!(op, BinaryOp::Eq);
        assert!(matches!(rhs.kind, ExprKind::Binary { op: BinaryOp::Lt, .. }));
    }

    #[test]
    fn spans_slice_source() {
        let src = "fn f(a, b) {\n    return a + b;\n}\n";
        let m = parse_source(src, "a").unwrap();
        let s = &m.functions[0].body.stmts[0];
        assert_eq!(m.snippet(&s.span), "return a + b;");
        assert_eq!(s.span.start_pos, Pos { line: 2, col: 5 });
        let StmtKind::Return(Some(e)) = &s.kind else {
            panic!()
        };
        assert_eq!(m.snippet(&e.span), "a + b");
        let ExprKind::Binary { op_span, .. } = &e.kind else {
            panic!()
        };
        assert_eq!(m.snippet(op_span), "+");
    }

    #[test]
    fn else_if_chain() {
        let src = "fn f(x) { if (x < 0) { return 0; } else if (x > 9) { return 9; } else { return x; } }";
        let m = parse_source(src, "a").unwrap();
        let StmtKind::If { else_branch, .. } = &m.functions[0].body.stmts[0].kind else {
            panic!()
        };
        assert!(matches!(else_branch, Some(ElseBranch::If(_))));
    }

    #[test]
    fn unclosed_block() {
        let err = parse_source("fn f() { let x = 1;", "a").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }));
    }
}
