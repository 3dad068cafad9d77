use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Reverse;

use super::types::{FnTypes, ModuleTypes, Ty};
use super::{MutagenError, MutationPoint, NodeKind, PointDetail, StmtClass};
use crate::lang::{Block, ElseBranch, Expr, ExprKind, OpClass, Span, Stmt, StmtKind, SubjectModule, UnaryOp};

/// Finds every mutation point that starts on one of `lines`, in
/// (line, column) order; nodes at the same position are ordered outermost
/// first.
pub fn discover_points(
    module: &SubjectModule,
    lines: &BTreeSet<u32>,
) -> Result<Vec<MutationPoint>, MutagenError> {
    if lines.is_empty() {
        return Err(MutagenError::EmptyLineSet);
    }
    let types = ModuleTypes::infer(module);
    let mut walker = Walker {
        module,
        lines,
        types: None,
        points: Vec::new(),
    };
    for f in &module.functions {
        walker.types = Some(types.function(f));
        walker.block(&f.body);
    }
    let mut points = walker.points;
    points.sort_by_key(|p| (p.line, p.span.start_pos.col, Reverse(p.span.end), p.node_kind));
    Ok(points)
}

struct Walker<'m, 'l> {
    module: &'m SubjectModule,
    lines: &'l BTreeSet<u32>,
    types: Option<FnTypes<'m>>,
    points: Vec<MutationPoint>,
}

#[derive(Clone, Copy)]
struct Ctx<'a> {
    bool_context: bool,
    /// Unary operator directly above this node, looking through parentheses.
    under_unary: Option<UnaryOp>,
    outer_call: Option<&'a str>,
}

impl Ctx<'_> {
    const TOP: Ctx<'static> = Ctx {
        bool_context: false,
        under_unary: None,
        outer_call: None,
    };
    const COND: Ctx<'static> = Ctx {
        bool_context: true,
        under_unary: None,
        outer_call: None,
    };
}

impl<'m> Walker<'m, '_> {
    fn push(&mut self, span: Span, node_kind: NodeKind, detail: PointDetail, callee: Option<&str>) {
        let line = span.start_pos.line;
        if !self.lines.contains(&line) {
            return;
        }
        self.points.push(MutationPoint {
            path: self.module.path.clone(),
            line,
            span,
            node_kind,
            original_snippet: String::from(self.module.snippet(&span)),
            detail,
            enclosing_callee: callee.map(String::from),
        });
    }

    fn block(&mut self, b: &'m Block) {
        for s in &b.stmts {
            self.stmt(s, true);
        }
    }

    fn stmt(&mut self, s: &'m Stmt, deletable: bool) {
        let (class, callee) = match &s.kind {
            StmtKind::Let { value, .. } => (StmtClass::Let, value.callee()),
            StmtKind::Assign { value, .. } => (StmtClass::Assign, value.callee()),
            StmtKind::If { .. } => (StmtClass::If, None),
            StmtKind::While { .. } => (StmtClass::While, None),
            StmtKind::Return(v) => (StmtClass::Return, v.as_ref().and_then(|e| e.callee())),
            StmtKind::Break => (StmtClass::Break, None),
            StmtKind::Continue => (StmtClass::Continue, None),
            StmtKind::Expr(e) => (StmtClass::Expr, e.callee()),
        };
        // An `else if` is not a statement of any block, so deleting it alone
        // would leave a dangling `else`.
        if deletable {
            self.push(s.span, NodeKind::Statement, PointDetail::Statement { class }, callee);
        }
        match &s.kind {
            StmtKind::Let { value, .. } | StmtKind::Assign { value, .. } | StmtKind::Expr(value) => {
                self.expr(value, Ctx::TOP)
            }
            StmtKind::Return(Some(value)) => self.expr(value, Ctx::TOP),
            StmtKind::If {
                cond,
                then_block,
                else_branch,
            } => {
                self.expr(cond, Ctx::COND);
                self.block(then_block);
                match else_branch {
                    Some(ElseBranch::Block(b)) => self.block(b),
                    Some(ElseBranch::If(nested)) => self.stmt(nested, false),
                    None => {}
                }
            }
            StmtKind::While { cond, body } => {
                self.expr(cond, Ctx::COND);
                self.block(body);
            }
            StmtKind::Return(None) | StmtKind::Break | StmtKind::Continue => {}
        }
    }

    fn expr(&mut self, e: &'m Expr, ctx: Ctx<'m>) {
        if let ExprKind::Paren(inner) = &e.kind {
            self.expr(inner, ctx);
            return;
        }
        let own_call = match &e.kind {
            ExprKind::Call { callee, .. } => Some(callee.name.as_str()),
            _ => None,
        };
        let callee = ctx.outer_call.or(own_call);

        if let ExprKind::Binary { op, op_span, .. } = &e.kind {
            let kind = match op.class() {
                OpClass::Arithmetic => NodeKind::BinaryArith,
                OpClass::Logical => NodeKind::BinaryLogical,
                OpClass::Relational => NodeKind::BinaryRelational,
            };
            self.push(
                e.span,
                kind,
                PointDetail::Binary {
                    op: *op,
                    op_span: *op_span,
                },
                callee,
            );
        }

        let ty = self
            .types
            .as_ref()
            .expect("function types")
            .type_of(e, ctx.bool_context);
        let typed = match ty {
            Ty::Int => Some((NodeKind::NumExpr, UnaryOp::Neg)),
            Ty::Bool => Some((NodeKind::BoolExpr, UnaryOp::Not)),
            Ty::Str | Ty::Unit => None,
        };
        if let Some((kind, insert)) = typed {
            let headed = matches!(&e.kind, ExprKind::Unary { op, .. } if *op == insert);
            self.push(
                e.span,
                kind,
                PointDetail::Typed {
                    needs_parens: matches!(e.kind, ExprKind::Binary { .. }),
                    double_negation: headed || ctx.under_unary == Some(insert),
                },
                callee,
            );
        }

        match &e.kind {
            ExprKind::Unary { op, operand } => self.expr(
                operand,
                Ctx {
                    bool_context: *op == UnaryOp::Not,
                    under_unary: Some(*op),
                    outer_call: callee,
                },
            ),
            ExprKind::Binary { op, lhs, rhs, .. } => {
                let child = Ctx {
                    bool_context: op.class() == OpClass::Logical,
                    under_unary: None,
                    outer_call: callee,
                };
                self.expr(lhs, child);
                self.expr(rhs, child);
            }
            ExprKind::Call { callee: name, args } => {
                let child = Ctx {
                    bool_context: name.name == "assert_true",
                    under_unary: None,
                    outer_call: callee,
                };
                for a in args {
                    self.expr(a, child);
                }
            }
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_source;
    use alloc::vec;

    fn points(src: &str, lines: &[u32]) -> Vec<(NodeKind, String)> {
        let m = parse_source(src, "m.mini").unwrap();
        discover_points(&m, &lines.iter().copied().collect())
            .unwrap()
            .into_iter()
            .map(|p| (p.node_kind, p.original_snippet))
            .collect()
    }

    #[test]
    fn arithmetic_return() {
        let got = points("fn f(a,b){ return a + b; }", &[1]);
        assert_eq!(
            got,
            vec![
                (NodeKind::Statement, "return a + b;".into()),
                (NodeKind::BinaryArith, "a + b".into()),
                (NodeKind::NumExpr, "a + b".into()),
                (NodeKind::NumExpr, "a".into()),
                (NodeKind::NumExpr, "b".into()),
            ]
        );
    }

    #[test]
    fn empty_line_set_is_contract_error() {
        let m = parse_source("fn f(){}", "m").unwrap();
        assert_eq!(
            discover_points(&m, &BTreeSet::new()),
            Err(MutagenError::EmptyLineSet)
        );
    }

    #[test]
    fn log_call_point_records_callee() {
        let m = parse_source("fn f(){ log(1); }", "m").unwrap();
        let pts = discover_points(&m, &[1].into_iter().collect()).unwrap();
        assert!(pts.iter().all(|p| p.enclosing_callee.as_deref() == Some("log")));
        assert!(pts.iter().any(|p| p.node_kind == NodeKind::Statement));
    }

    #[test]
    fn only_requested_lines() {
        let got = points("fn f(a) {\n    let x = a;\n    return x;\n}\n", &[3]);
        assert_eq!(
            got,
            vec![
                (NodeKind::Statement, "return x;".into()),
                (NodeKind::NumExpr, "x".into())
            ]
        );
    }

    #[test]
    fn parens_are_transparent_and_else_if_not_deletable() {
        let got = points(
            "fn f(a) { if (a > 1) { return 1; } else if ((a < 0)) { return 2; } return 3; }",
            &[1],
        );
        let stmts = got.iter().filter(|(k, _)| *k == NodeKind::Statement).count();
        // outer if + 3 returns; the nested `if` of the else branch is not a point
        assert_eq!(stmts, 4);
        assert!(!got.iter().any(|(_, s)| s == "((a < 0))"));
        assert!(got.iter().any(|(k, s)| *k == NodeKind::BoolExpr && s == "a < 0"));
    }

    #[test]
    fn double_negation_flagged() {
        let m = parse_source("fn f(x) { return -x; }", "m").unwrap();
        let pts = discover_points(&m, &[1].into_iter().collect()).unwrap();
        let flags: Vec<(String, bool)> = pts
            .iter()
            .filter_map(|p| match p.detail {
                PointDetail::Typed {
                    double_negation, ..
                } => Some((p.original_snippet.clone(), double_negation)),
                _ => None,
            })
            .collect();
        assert_eq!(flags, vec![("-x".into(), true), ("x".into(), true)]);
    }
}
