//! Source rendering.
//!
//! Nodes that still carry a parsed span (and whose descendants all do) are
//! emitted verbatim from the module's source text; anything built in memory
//! is pretty-printed in the canonical layout: one statement per line, four
//! spaces per nesting level, a blank line between functions.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use super::ast::*;

pub fn render_source(module: &SubjectModule) -> String {
    let r = Renderer {
        source: &module.source_text,
    };
    if !module.source_text.is_empty() && module.functions.iter().all(|f| r.fn_verbatim(f)) {
        return module.source_text.clone();
    }
    let mut out = String::new();
    for (i, f) in module.functions.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        r.function(f, &mut out);
        out.push('\n');
    }
    out
}

/// Renders one expression on its own, without source text.
pub fn render_expr(expr: &Expr) -> String {
    let r = Renderer { source: "" };
    let mut out = String::new();
    r.expr(expr, &mut out);
    out
}

/// Renders one statement at indentation level zero, without source text.
pub fn render_stmt(stmt: &Stmt) -> String {
    let r = Renderer { source: "" };
    let mut out = String::new();
    r.stmt(stmt, 0, &mut out);
    out
}

/// Quotes a string literal, escaping what the lexer unescapes.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

struct Renderer<'a> {
    source: &'a str,
}

const INDENT: &str = "    ";

impl Renderer<'_> {
    fn has(&self, span: &crate::lang::Span) -> bool {
        !self.source.is_empty() && !span.is_dummy() && span.end <= self.source.len()
    }

    fn slice(&self, span: &crate::lang::Span) -> &str {
        &self.source[span.start..span.end]
    }

    fn fn_verbatim(&self, f: &FunctionDef) -> bool {
        self.has(&f.span)
            && self.has(&f.name.span)
            && f.params.iter().all(|p| self.has(&p.span))
            && self.block_verbatim(&f.body)
    }

    fn block_verbatim(&self, b: &Block) -> bool {
        self.has(&b.span) && b.stmts.iter().all(|s| self.stmt_verbatim(s))
    }

    fn stmt_verbatim(&self, s: &Stmt) -> bool {
        if !self.has(&s.span) {
            return false;
        }
        match &s.kind {
            StmtKind::Let { name, value } => self.has(&name.span) && self.expr_verbatim(value),
            StmtKind::Assign { target, value } => {
                self.has(&target.span) && self.expr_verbatim(value)
            }
            StmtKind::If {
                cond,
                then_block,
                else_branch,
            } => {
                self.expr_verbatim(cond)
                    && self.block_verbatim(then_block)
                    && match else_branch {
                        None => true,
                        Some(ElseBranch::Block(b)) => self.block_verbatim(b),
                        Some(ElseBranch::If(s)) => self.stmt_verbatim(s),
                    }
            }
            StmtKind::While { cond, body } => self.expr_verbatim(cond) && self.block_verbatim(body),
            StmtKind::Return(v) => v.as_ref().is_none_or(|e| self.expr_verbatim(e)),
            StmtKind::Break | StmtKind::Continue => true,
            StmtKind::Expr(e) => self.expr_verbatim(e),
        }
    }

    fn expr_verbatim(&self, e: &Expr) -> bool {
        if !self.has(&e.span) {
            return false;
        }
        match &e.kind {
            ExprKind::Call { callee, args } => {
                self.has(&callee.span) && args.iter().all(|a| self.expr_verbatim(a))
            }
            ExprKind::Unary { operand, .. } => self.expr_verbatim(operand),
            ExprKind::Binary { lhs, rhs, op_span, .. } => {
                self.has(op_span) && self.expr_verbatim(lhs) && self.expr_verbatim(rhs)
            }
            ExprKind::Paren(inner) => self.expr_verbatim(inner),
            _ => true,
        }
    }

    fn function(&self, f: &FunctionDef, out: &mut String) {
        if self.fn_verbatim(f) {
            out.push_str(self.slice(&f.span));
            return;
        }
        let params: Vec<&str> = f.params.iter().map(|p| p.name.as_str()).collect();
        let _ = write!(out, "fn {}({}) ", f.name.name, params.join(", "));
        self.block(&f.body, 0, out);
    }

    fn block(&self, b: &Block, level: usize, out: &mut String) {
        if self.block_verbatim(b) {
            out.push_str(self.slice(&b.span));
            return;
        }
        if b.stmts.is_empty() {
            out.push_str("{}");
            return;
        }
        out.push_str("{\n");
        for s in &b.stmts {
            for _ in 0..=level {
                out.push_str(INDENT);
            }
            self.stmt(s, level + 1, out);
            out.push('\n');
        }
        for _ in 0..level {
            out.push_str(INDENT);
        }
        out.push('}');
    }

    fn stmt(&self, s: &Stmt, level: usize, out: &mut String) {
        if self.stmt_verbatim(s) {
            out.push_str(self.slice(&s.span));
            return;
        }
        match &s.kind {
            StmtKind::Let { name, value } => {
                let _ = write!(out, "let {} = ", name.name);
                self.expr(value, out);
                out.push(';');
            }
            StmtKind::Assign { target, value } => {
                let _ = write!(out, "{} = ", target.name);
                self.expr(value, out);
                out.push(';');
            }
            StmtKind::If {
                cond,
                then_block,
                else_branch,
            } => {
                out.push_str("if (");
                self.expr(cond, out);
                out.push_str(") ");
                self.block(then_block, level, out);
                match else_branch {
                    None => {}
                    Some(ElseBranch::Block(b)) => {
                        out.push_str(" else ");
                        self.block(b, level, out);
                    }
                    Some(ElseBranch::If(nested)) => {
                        out.push_str(" else ");
                        self.stmt(nested, level, out);
                    }
                }
            }
            StmtKind::While { cond, body } => {
                out.push_str("while (");
                self.expr(cond, out);
                out.push_str(") ");
                self.block(body, level, out);
            }
            StmtKind::Return(None) => out.push_str("return;"),
            StmtKind::Return(Some(e)) => {
                out.push_str("return ");
                self.expr(e, out);
                out.push(';');
            }
            StmtKind::Break => out.push_str("break;"),
            StmtKind::Continue => out.push_str("continue;"),
            StmtKind::Expr(e) => {
                self.expr(e, out);
                out.push(';');
            }
        }
    }

    fn expr(&self, e: &Expr, out: &mut String) {
        if self.expr_verbatim(e) {
            out.push_str(self.slice(&e.span));
            return;
        }
        match &e.kind {
            ExprKind::Int(v) => {
                let _ = write!(out, "{v}");
            }
            ExprKind::Bool(b) => {
                let _ = write!(out, "{b}");
            }
            ExprKind::Str(s) => out.push_str(&quote(s)),
            ExprKind::Var(name) => out.push_str(name),
            ExprKind::Call { callee, args } => {
                out.push_str(&callee.name);
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    self.expr(a, out);
                }
                out.push(')');
            }
            ExprKind::Unary { op, operand } => {
                out.push_str(op.symbol());
                self.operand(operand, 7, false, out);
            }
            ExprKind::Binary { op, lhs, rhs, .. } => {
                let prec = op.precedence();
                self.operand(lhs, prec, false, out);
                let _ = write!(out, " {} ", op.symbol());
                self.operand(rhs, prec, true, out);
            }
            ExprKind::Paren(inner) => {
                out.push('(');
                self.expr(inner, out);
                out.push(')');
            }
        }
    }

    /// Renders a subexpression, adding parentheses only when the tree would
    /// otherwise re-parse differently.
    fn operand(&self, e: &Expr, parent_prec: u8, right: bool, out: &mut String) {
        let own = match &e.kind {
            ExprKind::Binary { op, .. } => op.precedence(),
            ExprKind::Unary { .. } => 7,
            _ => 8,
        };
        let wrap = own < parent_prec || (right && own == parent_prec && own <= 6);
        if wrap {
            out.push('(');
            self.expr(e, out);
            out.push(')');
        } else {
            self.expr(e, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_source;
    use alloc::boxed::Box;

    #[test]
    fn round_trip_is_verbatim() {
        let src = "fn main() { return 1; }";
        assert_eq!(render_source(&parse_source(src, "m").unwrap()), src);
        let src = "// header\nfn f(a,b){\n  return a+b; // sum\n}\n\n\nfn g() {}\n";
        assert_eq!(render_source(&parse_source(src, "m").unwrap()), src);
    }

    #[test]
    fn empty_module_renders_empty() {
        assert_eq!(render_source(&SubjectModule::default()), "");
    }

    #[test]
    fn canonical_layout_for_built_modules() {
        let src = "fn f(a) { if (a < 1) { return 2; } else { while (true) { break; } } log(\"x\\n\"); }";
        let mut m = parse_source(src, "m").unwrap();
        m.source_text.clear();
        let expected = "fn f(a) {\n    if (a < 1) {\n        return 2;\n    } else {\n        while (true) {\n            break;\n        }\n    }\n    log(\"x\\n\");\n}\n";
        assert_eq!(render_source(&m), expected);
        assert_eq!(parse_source(expected, "m").unwrap(), m);
    }

    #[test]
    fn replaced_node_keeps_sibling_text() {
        let src = "fn f(a, b) {\n    let x = a  *  b;\n    return x;\n}\n";
        let mut m = parse_source(src, "m").unwrap();
        let StmtKind::Return(Some(e)) = &mut m.functions[0].body.stmts[1].kind else {
            panic!()
        };
        *e = Expr::new(ExprKind::Unary {
            op: UnaryOp::Neg,
            operand: Box::new(Expr::new(ExprKind::Var("x".into()))),
        });
        let out = render_source(&m);
        assert!(out.contains("let x = a  *  b;"), "{out}");
        assert!(out.contains("return -x;"), "{out}");
        assert_eq!(parse_source(&out, "m").unwrap(), m);
    }

    #[test]
    fn operands_parenthesised_when_needed() {
        let var = |n: &str| Box::new(Expr::new(ExprKind::Var(n.into())));
        let bin = |op, lhs, rhs| {
            Box::new(Expr::new(ExprKind::Binary {
                op,
                op_span: crate::lang::Span::DUMMY,
                lhs,
                rhs,
            }))
        };
        let e = bin(BinaryOp::Sub, var("a"), bin(BinaryOp::Sub, var("b"), var("c")));
        assert_eq!(render_expr(&e), "a - (b - c)");
        let e = bin(BinaryOp::Mul, bin(BinaryOp::Add, var("a"), var("b")), var("c"));
        assert_eq!(render_expr(&e), "(a + b) * c");
    }
}
