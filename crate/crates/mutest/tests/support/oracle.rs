//! Brute-force mutant counter for generated modules.
//!
//! It shares nothing with the engine beyond the parsed AST: types come from
//! the generator's naming conventions instead of type inference, and counts
//! come straight from the operator table (AOR 4, LCR 1, ROR 5, UOI 1,
//! SBR 1).

use std::collections::BTreeMap;

use mutest_core::lang::*;

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Int,
    Bool,
    Other,
}

fn denied(callee: &str) -> bool {
    callee == "log" || callee == "print" || callee.starts_with("debug") || callee.starts_with("trace")
}

fn kind_of(e: &Expr) -> Kind {
    match &e.kind {
        ExprKind::Int(_) => Kind::Int,
        ExprKind::Bool(_) => Kind::Bool,
        ExprKind::Str(_) => Kind::Other,
        ExprKind::Var(n) => {
            if n.starts_with('b') || n.starts_with('p') {
                Kind::Bool
            } else {
                Kind::Int
            }
        }
        ExprKind::Call { callee, .. } => match callee.name.as_str() {
            n if n.starts_with('g') => Kind::Bool,
            n if n.starts_with("assert") => Kind::Other,
            _ => Kind::Int,
        },
        ExprKind::Unary { op: UnaryOp::Neg, .. } => Kind::Int,
        ExprKind::Unary { op: UnaryOp::Not, .. } => Kind::Bool,
        ExprKind::Binary { op, .. } => match op {
            BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem => Kind::Int,
            _ => Kind::Bool,
        },
        ExprKind::Paren(inner) => kind_of(inner),
    }
}

struct Counter {
    per_line: BTreeMap<u32, usize>,
}

impl Counter {
    fn add(&mut self, line: u32, n: usize) {
        if n > 0 {
            *self.per_line.entry(line).or_default() += n;
        }
    }

    fn block(&mut self, b: &Block) {
        for s in &b.stmts {
            self.stmt(s, true);
        }
    }

    fn stmt(&mut self, s: &Stmt, in_block: bool) {
        let line = s.span.start_pos.line;
        let value_callee = |e: &Expr| match &e.unparen().kind {
            ExprKind::Call { callee, .. } => Some(callee.name.clone()),
            _ => None,
        };
        match &s.kind {
            StmtKind::Let { value, .. } => self.expr(value, false, None, None),
            StmtKind::Assign { value, .. } | StmtKind::Expr(value) => {
                let c = value_callee(value);
                if in_block && !c.as_deref().is_some_and(denied) {
                    self.add(line, 1);
                }
                self.expr(value, false, None, None);
            }
            StmtKind::Return(v) => {
                if let Some(v) = v {
                    self.expr(v, false, None, None);
                }
            }
            StmtKind::Break | StmtKind::Continue => {}
            StmtKind::If {
                cond,
                then_block,
                else_branch,
            } => {
                if in_block {
                    self.add(line, 1);
                }
                self.expr(cond, true, None, None);
                self.block(then_block);
                match else_branch {
                    Some(ElseBranch::Block(b)) => self.block(b),
                    Some(ElseBranch::If(nested)) => self.stmt(nested, false),
                    None => {}
                }
            }
            StmtKind::While { cond, body } => {
                if in_block {
                    self.add(line, 1);
                }
                self.expr(cond, true, None, None);
                self.block(body);
            }
        }
    }

    fn expr(&mut self, e: &Expr, bool_ctx: bool, parent_unary: Option<UnaryOp>, call: Option<&str>) {
        if let ExprKind::Paren(inner) = &e.kind {
            return self.expr(inner, bool_ctx, parent_unary, call);
        }
        let call = match (&e.kind, call) {
            (_, Some(c)) => Some(c),
            (ExprKind::Call { callee, .. }, None) => Some(callee.name.as_str()),
            _ => None,
        };
        let suppressed = call.is_some_and(denied);
        let line = e.span.start_pos.line;
        if !suppressed {
            if let ExprKind::Binary { op, .. } = &e.kind {
                let n = match op {
                    BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem => 4,
                    BinaryOp::And | BinaryOp::Or => 1,
                    _ => 5,
                };
                self.add(line, n);
            }
            let inserted = match kind_of(e) {
                Kind::Int => Some(UnaryOp::Neg),
                Kind::Bool => Some(UnaryOp::Not),
                // an unknown call read as a condition is a boolean
                Kind::Other if bool_ctx && matches!(e.kind, ExprKind::Call { .. }) => Some(UnaryOp::Not),
                Kind::Other => None,
            };
            if let Some(op) = inserted {
                let headed = matches!(&e.kind, ExprKind::Unary { op: o, .. } if *o == op);
                if !headed && parent_unary != Some(op) {
                    self.add(line, 1);
                }
            }
        }
        match &e.kind {
            ExprKind::Unary { op, operand } => self.expr(operand, *op == UnaryOp::Not, Some(*op), call),
            ExprKind::Binary { op, lhs, rhs, .. } => {
                let b = matches!(op, BinaryOp::And | BinaryOp::Or);
                self.expr(lhs, b, None, call);
                self.expr(rhs, b, None, call);
            }
            ExprKind::Call { callee, args } => {
                for a in args {
                    self.expr(a, callee.name == "assert_true", None, call);
                }
            }
            _ => {}
        }
    }
}

/// Mutant count per line, lines without mutants omitted.
pub fn count_per_line(module: &SubjectModule) -> BTreeMap<u32, usize> {
    let mut c = Counter {
        per_line: BTreeMap::new(),
    };
    for f in &module.functions {
        c.block(&f.body);
    }
    c.per_line
}
