//! Random well-formed MiniLang modules for property tests.
//!
//! Generated programs follow naming conventions that make every value's
//! type visible from the source alone, so test oracles never need the
//! inference pass:
//!
//! - functions `f<k>` return integers, `g<k>` return booleans
//! - integer parameters are `x<k>`, boolean parameters `p<k>`
//! - integer locals are `n<k>`, boolean locals `b<k>`
//!
//! Each boolean parameter is read in a condition at the top of its function,
//! and integer names never appear in a boolean context. Sub-expressions that
//! are themselves operators are wrapped in parentheses, so rendering never
//! has to invent any. Functions only call functions defined before them.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

use crate::lang::*;

#[derive(Clone, Copy, Debug)]
pub struct GenConfig {
    pub max_functions: usize,
    pub max_params: usize,
    pub max_stmts: usize,
    pub max_block_depth: usize,
    pub max_expr_depth: usize,
    /// Rendered modules longer than this are regenerated.
    pub max_lines: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_functions: 4,
            max_params: 3,
            max_stmts: 5,
            max_block_depth: 2,
            max_expr_depth: 3,
            max_lines: 200,
        }
    }
}

impl GenConfig {
    /// Small modules of at most 40 rendered lines.
    pub fn small() -> Self {
        GenConfig {
            max_functions: 3,
            max_params: 2,
            max_stmts: 4,
            max_block_depth: 2,
            max_expr_depth: 3,
            max_lines: 40,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum T {
    Int,
    Bool,
}

struct Sig {
    name: String,
    params: Vec<T>,
}

struct FnScope {
    ret: T,
    params: Vec<(String, T)>,
    locals: Vec<(String, T)>,
}

impl FnScope {
    fn vars(&self, t: T) -> Vec<&str> {
        self.params
            .iter()
            .chain(&self.locals)
            .filter(|(_, ty)| *ty == t)
            .map(|(n, _)| n.as_str())
            .collect()
    }

    fn locals(&self, t: T) -> Vec<&str> {
        self.locals
            .iter()
            .filter(|(_, ty)| *ty == t)
            .map(|(n, _)| n.as_str())
            .collect()
    }
}

struct Gen<'c> {
    rng: SmallRng,
    cfg: &'c GenConfig,
    sigs: Vec<Sig>,
}

fn ex(kind: ExprKind) -> Expr {
    Expr::new(kind)
}

fn st(kind: StmtKind) -> Stmt {
    Stmt {
        kind,
        span: Span::DUMMY,
    }
}

fn block(stmts: Vec<Stmt>) -> Block {
    Block {
        stmts,
        span: Span::DUMMY,
    }
}

/// Parenthesizes anything that is not an atom.
fn operand(e: Expr) -> Box<Expr> {
    Box::new(match e.kind {
        ExprKind::Binary { .. } | ExprKind::Unary { .. } => ex(ExprKind::Paren(Box::new(e))),
        _ => e,
    })
}

fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
    ex(ExprKind::Binary {
        op,
        op_span: Span::DUMMY,
        lhs: operand(lhs),
        rhs: operand(rhs),
    })
}

fn call(name: &str, args: Vec<Expr>) -> Expr {
    ex(ExprKind::Call {
        callee: Ident::new(name),
        args,
    })
}

impl Gen<'_> {
    fn pick<'a>(&mut self, xs: &[&'a str]) -> &'a str {
        xs[self.rng.gen_range(0..xs.len())]
    }

    fn expr(&mut self, t: T, scope: &FnScope, depth: usize) -> Expr {
        let leaf = depth == 0 || self.rng.gen_bool(0.35);
        if leaf {
            return self.atom(t, scope);
        }
        let d = depth - 1;
        match t {
            T::Int => match self.rng.gen_range(0..10) {
                0..=5 => {
                    let op = BinaryOp::ARITHMETIC[self.rng.gen_range(0..5)];
                    let (l, r) = (self.expr(T::Int, scope, d), self.expr(T::Int, scope, d));
                    binary(op, l, r)
                }
                6 => {
                    let inner = self.expr(T::Int, scope, d);
                    ex(ExprKind::Unary {
                        op: UnaryOp::Neg,
                        operand: operand(inner),
                    })
                }
                7 => ex(ExprKind::Paren(Box::new(self.expr(T::Int, scope, d)))),
                _ => self.call_of(T::Int, scope, d).unwrap_or_else(|| self.atom(T::Int, scope)),
            },
            T::Bool => match self.rng.gen_range(0..10) {
                0..=3 => {
                    let op = BinaryOp::RELATIONAL[self.rng.gen_range(0..6)];
                    let (l, r) = (self.expr(T::Int, scope, d), self.expr(T::Int, scope, d));
                    binary(op, l, r)
                }
                4..=5 => {
                    let op = BinaryOp::LOGICAL[self.rng.gen_range(0..2)];
                    let (l, r) = (self.expr(T::Bool, scope, d), self.expr(T::Bool, scope, d));
                    binary(op, l, r)
                }
                6 => {
                    let inner = self.expr(T::Bool, scope, d);
                    ex(ExprKind::Unary {
                        op: UnaryOp::Not,
                        operand: operand(inner),
                    })
                }
                7 => ex(ExprKind::Paren(Box::new(self.expr(T::Bool, scope, d)))),
                _ => self.call_of(T::Bool, scope, d).unwrap_or_else(|| self.atom(T::Bool, scope)),
            },
        }
    }

    fn atom(&mut self, t: T, scope: &FnScope) -> Expr {
        let vars = scope.vars(t);
        if !vars.is_empty() && self.rng.gen_bool(0.6) {
            return ex(ExprKind::Var(String::from(self.pick(&vars))));
        }
        match t {
            T::Int => ex(ExprKind::Int(self.rng.gen_range(0..20))),
            T::Bool => ex(ExprKind::Bool(self.rng.gen_bool(0.5))),
        }
    }

    fn call_of(&mut self, t: T, scope: &FnScope, depth: usize) -> Option<Expr> {
        let prefix = if t == T::Int { 'f' } else { 'g' };
        let candidates: Vec<usize> = (0..self.sigs.len())
            .filter(|&i| self.sigs[i].name.starts_with(prefix))
            .collect();
        if candidates.is_empty() {
            return None;
        }
        let i = candidates[self.rng.gen_range(0..candidates.len())];
        let params = self.sigs[i].params.clone();
        let args = params.iter().map(|&pt| self.expr(pt, scope, depth)).collect();
        Some(call(&self.sigs[i].name.clone(), args))
    }

    fn stmts(&mut self, scope: &mut FnScope, depth: usize, in_loop: bool, top: bool) -> Vec<Stmt> {
        let n = self.rng.gen_range(1..=self.cfg.max_stmts);
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            out.push(self.stmt(scope, depth, in_loop, top));
        }
        out
    }

    fn stmt(&mut self, scope: &mut FnScope, depth: usize, in_loop: bool, top: bool) -> Stmt {
        let ed = self.cfg.max_expr_depth;
        loop {
            match self.rng.gen_range(0..14) {
                // declarations only at function level so every later read is in scope
                0..=2 if top => {
                    let t = if self.rng.gen_bool(0.5) { T::Int } else { T::Bool };
                    let value = self.expr(t, scope, ed);
                    let k = scope.locals.len();
                    let name = if t == T::Int { format!("n{k}") } else { format!("b{k}") };
                    scope.locals.push((name.clone(), t));
                    return st(StmtKind::Let {
                        name: Ident::new(name),
                        value,
                    });
                }
                3..=4 => {
                    let t = if self.rng.gen_bool(0.5) { T::Int } else { T::Bool };
                    let targets = scope.locals(t);
                    if targets.is_empty() {
                        continue;
                    }
                    let target = String::from(self.pick(&targets));
                    let value = self.expr(t, scope, ed);
                    return st(StmtKind::Assign {
                        target: Ident::new(target),
                        value,
                    });
                }
                5..=6 if depth > 0 => {
                    let cond = self.expr(T::Bool, scope, ed);
                    let then_block = block(self.stmts(scope, depth - 1, in_loop, false));
                    let else_branch = match self.rng.gen_range(0..3) {
                        0 => None,
                        1 => Some(ElseBranch::Block(block(self.stmts(scope, depth - 1, in_loop, false)))),
                        _ => {
                            let c = self.expr(T::Bool, scope, ed);
                            let b = block(self.stmts(scope, depth - 1, in_loop, false));
                            Some(ElseBranch::If(Box::new(st(StmtKind::If {
                                cond: c,
                                then_block: b,
                                else_branch: None,
                            }))))
                        }
                    };
                    return st(StmtKind::If {
                        cond,
                        then_block,
                        else_branch,
                    });
                }
                7 if depth > 0 => {
                    let cond = self.expr(T::Bool, scope, ed);
                    let body = block(self.stmts(scope, depth - 1, true, false));
                    return st(StmtKind::While { cond, body });
                }
                8 if !top => {
                    let v = self.expr(scope.ret, scope, ed);
                    return st(StmtKind::Return(Some(v)));
                }
                9 if in_loop => {
                    return st(if self.rng.gen_bool(0.5) {
                        StmtKind::Break
                    } else {
                        StmtKind::Continue
                    })
                }
                10 => {
                    let e = match self.rng.gen_range(0..4) {
                        0 => call("log", alloc::vec![ex(ExprKind::Str(String::from("trace")))]),
                        1 => call("print", alloc::vec![self.expr(T::Int, scope, ed)]),
                        2 => call("assert_true", alloc::vec![self.expr(T::Bool, scope, ed)]),
                        _ => call(
                            "assert_eq",
                            alloc::vec![self.expr(T::Int, scope, 1), self.expr(T::Int, scope, 1)],
                        ),
                    };
                    return st(StmtKind::Expr(e));
                }
                11 => {
                    let t = if self.rng.gen_bool(0.5) { T::Int } else { T::Bool };
                    if let Some(e) = self.call_of(t, scope, 1) {
                        return st(StmtKind::Expr(e));
                    }
                }
                12..=13 => {
                    let t = if self.rng.gen_bool(0.5) { T::Int } else { T::Bool };
                    let targets = scope.locals(t);
                    if targets.is_empty() {
                        continue;
                    }
                    let target = String::from(self.pick(&targets));
                    let value = self.expr(t, scope, ed);
                    return st(StmtKind::Assign {
                        target: Ident::new(target),
                        value,
                    });
                }
                _ => {}
            }
        }
    }

    fn function(&mut self, index: usize) -> FunctionDef {
        let ret = if self.rng.gen_bool(0.5) { T::Int } else { T::Bool };
        let name = match ret {
            T::Int => format!("f{index}"),
            T::Bool => format!("g{index}"),
        };
        let n_params = self.rng.gen_range(0..=self.cfg.max_params);
        let params: Vec<(String, T)> = (0..n_params)
            .map(|k| {
                if self.rng.gen_bool(0.4) {
                    (format!("p{k}"), T::Bool)
                } else {
                    (format!("x{k}"), T::Int)
                }
            })
            .collect();
        let mut scope = FnScope {
            ret,
            params: params.clone(),
            locals: Vec::new(),
        };
        let mut body = Vec::new();
        for (p, t) in &params {
            if *t == T::Bool {
                let inner = self.stmts(&mut scope, 0, false, false);
                body.push(st(StmtKind::If {
                    cond: ex(ExprKind::Var(p.clone())),
                    then_block: block(inner),
                    else_branch: None,
                }));
            }
        }
        body.extend(self.stmts(&mut scope, self.cfg.max_block_depth, false, true));
        let last = self.expr(ret, &scope, self.cfg.max_expr_depth);
        body.push(st(StmtKind::Return(Some(last))));
        self.sigs.push(Sig {
            name: name.clone(),
            params: params.iter().map(|(_, t)| *t).collect(),
        });
        FunctionDef {
            name: Ident::new(name),
            params: params.into_iter().map(|(n, _)| Ident::new(n)).collect(),
            body: block(body),
            span: Span::DUMMY,
        }
    }
}

/// Builds a module in memory (no source text, dummy spans).
pub fn generate_ast(seed: u64, cfg: &GenConfig) -> SubjectModule {
    let mut g = Gen {
        rng: SmallRng::seed_from_u64(seed),
        cfg,
        sigs: Vec::new(),
    };
    let n = g.rng.gen_range(1..=cfg.max_functions);
    let functions = (0..n).map(|i| g.function(i)).collect();
    SubjectModule {
        path: String::new(),
        source_text: String::new(),
        functions,
    }
}

/// Generates, renders and parses a module no longer than `cfg.max_lines`.
/// Seeds whose module is too long are retried with derived seeds.
pub fn generate_module(seed: u64, cfg: &GenConfig, path: &str) -> SubjectModule {
    let mut s = seed;
    loop {
        let text = render_source(&generate_ast(s, cfg));
        if text.lines().count() <= cfg.max_lines {
            return parse_source(&text, path).expect("generated module parses");
        }
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    }
}
