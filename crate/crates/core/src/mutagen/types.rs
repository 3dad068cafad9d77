//! Local type inference used to pick UOI insertion sites.
//!
//! MiniLang is dynamically typed, so this is a best-effort static pass:
//! literals and operators determine their own type, variables take the type
//! of what is stored in them or of the boolean context they are read in,
//! and anything still unknown is assumed to be an integer.

use alloc::collections::BTreeMap;
use alloc::string::String;

use crate::lang::{BinaryOp, Block, ElseBranch, Expr, ExprKind, FunctionDef, OpClass, StmtKind, SubjectModule, UnaryOp};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ty {
    Int,
    Bool,
    Str,
    Unit,
}

/// Inferred return types of the functions defined in one module.
pub struct ModuleTypes {
    returns: BTreeMap<String, Ty>,
}

/// Inferred variable types within one function.
pub struct FnTypes<'m> {
    module: &'m ModuleTypes,
    vars: BTreeMap<String, Ty>,
}

impl ModuleTypes {
    pub fn infer(module: &SubjectModule) -> Self {
        let mut this = ModuleTypes {
            returns: BTreeMap::new(),
        };
        // Return types can depend on each other through calls; iterate until
        // nothing changes (the lattice is tiny, so this settles quickly).
        for _ in 0..=module.functions.len() {
            let mut changed = false;
            for f in &module.functions {
                let ty = {
                    let locals = FnTypes::infer(&this, f);
                    locals.return_type(&f.body)
                };
                if this.returns.insert(f.name.name.clone(), ty) != Some(ty) {
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        this
    }

    pub fn function<'m>(&'m self, f: &FunctionDef) -> FnTypes<'m> {
        FnTypes::infer(self, f)
    }
}

impl<'m> FnTypes<'m> {
    fn infer(module: &'m ModuleTypes, f: &FunctionDef) -> Self {
        let mut this = FnTypes {
            module,
            vars: BTreeMap::new(),
        };
        for _ in 0..8 {
            let before = this.vars.clone();
            this.scan_block(&f.body);
            if before == this.vars {
                break;
            }
        }
        this
    }

    fn mark(&mut self, name: &str, ty: Ty) {
        if matches!(ty, Ty::Bool | Ty::Str) {
            self.vars.entry(String::from(name)).or_insert(ty);
        }
    }

    fn mark_bool_use(&mut self, e: &Expr) {
        if let ExprKind::Var(name) = &e.unparen().kind {
            self.mark(name, Ty::Bool);
        }
    }

    fn scan_block(&mut self, b: &Block) {
        for s in &b.stmts {
            self.scan_stmt(&s.kind);
        }
    }

    fn scan_stmt(&mut self, kind: &StmtKind) {
        match kind {
            StmtKind::Let { name, value } => {
                let ty = self.type_of(value, false);
                self.mark(&name.name, ty);
                self.scan_expr(value);
            }
            StmtKind::Assign { target, value } => {
                let ty = self.type_of(value, false);
                self.mark(&target.name, ty);
                self.scan_expr(value);
            }
            StmtKind::If {
                cond,
                then_block,
                else_branch,
            } => {
                self.mark_bool_use(cond);
                self.scan_expr(cond);
                self.scan_block(then_block);
                match else_branch {
                    Some(ElseBranch::Block(b)) => self.scan_block(b),
                    Some(ElseBranch::If(s)) => self.scan_stmt(&s.kind),
                    None => {}
                }
            }
            StmtKind::While { cond, body } => {
                self.mark_bool_use(cond);
                self.scan_expr(cond);
                self.scan_block(body);
            }
            StmtKind::Return(Some(e)) | StmtKind::Expr(e) => self.scan_expr(e),
            StmtKind::Return(None) | StmtKind::Break | StmtKind::Continue => {}
        }
    }

    fn scan_expr(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Unary { op, operand } => {
                if *op == UnaryOp::Not {
                    self.mark_bool_use(operand);
                }
                self.scan_expr(operand);
            }
            ExprKind::Binary { op, lhs, rhs, .. } => {
                if op.class() == OpClass::Logical {
                    self.mark_bool_use(lhs);
                    self.mark_bool_use(rhs);
                }
                self.scan_expr(lhs);
                self.scan_expr(rhs);
            }
            ExprKind::Call { callee, args } => {
                if callee.name == "assert_true" {
                    if let Some(a) = args.first() {
                        self.mark_bool_use(a);
                    }
                }
                for a in args {
                    self.scan_expr(a);
                }
            }
            ExprKind::Paren(inner) => self.scan_expr(inner),
            _ => {}
        }
    }

    fn return_type(&self, b: &Block) -> Ty {
        let mut found = None;
        self.returns_in(b, &mut found);
        found.unwrap_or(Ty::Unit)
    }

    fn returns_in(&self, b: &Block, found: &mut Option<Ty>) {
        for s in &b.stmts {
            self.returns_in_stmt(&s.kind, found);
        }
    }

    fn returns_in_stmt(&self, kind: &StmtKind, found: &mut Option<Ty>) {
        match kind {
            StmtKind::Return(Some(e)) => {
                let ty = self.type_of(e, false);
                if found.is_none() || *found == Some(Ty::Unit) {
                    *found = Some(ty);
                }
            }
            StmtKind::Return(None) => {
                found.get_or_insert(Ty::Unit);
            }
            StmtKind::If {
                then_block,
                else_branch,
                ..
            } => {
                self.returns_in(then_block, found);
                match else_branch {
                    Some(ElseBranch::Block(b)) => self.returns_in(b, found),
                    Some(ElseBranch::If(s)) => self.returns_in_stmt(&s.kind, found),
                    None => {}
                }
            }
            StmtKind::While { body, .. } => self.returns_in(body, found),
            _ => {}
        }
    }

    /// Type of `e`; `bool_context` is true where the surrounding syntax
    /// demands a boolean (conditions, logical operands, `!` operands).
    pub fn type_of(&self, e: &Expr, bool_context: bool) -> Ty {
        match &e.kind {
            ExprKind::Int(_) => Ty::Int,
            ExprKind::Bool(_) => Ty::Bool,
            ExprKind::Str(_) => Ty::Str,
            ExprKind::Var(name) => match self.vars.get(name) {
                Some(ty) => *ty,
                None if bool_context => Ty::Bool,
                None => Ty::Int,
            },
            ExprKind::Paren(inner) => self.type_of(inner, bool_context),
            ExprKind::Unary { op: UnaryOp::Neg, .. } => Ty::Int,
            ExprKind::Unary { op: UnaryOp::Not, .. } => Ty::Bool,
            ExprKind::Binary { op, .. } => match op.class() {
                OpClass::Arithmetic => Ty::Int,
                _ => Ty::Bool,
            },
            ExprKind::Call { callee, .. } => match callee.name.as_str() {
                "print" | "log" => Ty::Int,
                "assert_true" | "assert_eq" => Ty::Unit,
                name => match self.module.returns.get(name) {
                    Some(ty) => *ty,
                    None if bool_context => Ty::Bool,
                    None => Ty::Int,
                },
            },
        }
    }
}

/// Whether the operand positions of `op` demand booleans.
pub fn operands_are_bool(op: BinaryOp) -> bool {
    op.class() == OpClass::Logical
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_source;

    fn ret(src: &str, name: &str) -> Ty {
        let m = parse_source(src, "m").unwrap();
        let t = ModuleTypes::infer(&m);
        t.returns[name]
    }

    #[test]
    fn return_types() {
        let src = "fn a(x) { return x + 1; } fn b(x) { return x < 1; } fn c() { log(1); } fn d(x) { return b(x); }";
        assert_eq!(ret(src, "a"), Ty::Int);
        assert_eq!(ret(src, "b"), Ty::Bool);
        assert_eq!(ret(src, "c"), Ty::Unit);
        assert_eq!(ret(src, "d"), Ty::Bool);
    }

    #[test]
    fn params_become_bool_when_used_as_bool() {
        let src = "fn f(a, b, n) { if (a && n > 0) { return b; } return !b; }";
        let m = parse_source(src, "m").unwrap();
        let mt = ModuleTypes::infer(&m);
        let ft = mt.function(&m.functions[0]);
        assert_eq!(ft.vars.get("a"), Some(&Ty::Bool));
        assert_eq!(ft.vars.get("b"), Some(&Ty::Bool));
        assert_eq!(ft.vars.get("n"), None);
        assert_eq!(ret(src, "f"), Ty::Bool);
    }

    #[test]
    fn let_takes_initializer_type() {
        let src = "fn f() { let s = \"x\"; let ok = 1 == 1; let n = 3; let m = ok; return m; }";
        let m = parse_source(src, "m").unwrap();
        let mt = ModuleTypes::infer(&m);
        let ft = mt.function(&m.functions[0]);
        assert_eq!(ft.vars.get("s"), Some(&Ty::Str));
        assert_eq!(ft.vars.get("m"), Some(&Ty::Bool));
        assert_eq!(ft.vars.get("n"), None);
    }
}
