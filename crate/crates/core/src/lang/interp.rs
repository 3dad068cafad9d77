//! Deterministic tree-walking interpreter and in-process test harness.
//!
//! Every statement execution and every expression evaluation costs one step.
//! A test that reaches its step budget is stopped and reported as a timeout.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::ast::*;

pub const DEFAULT_STEP_BUDGET: u64 = 100_000;

/// Maximum nesting of user function calls before a test faults.
pub const MAX_CALL_DEPTH: usize = 200;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Str(String),
    Unit,
}

impl Value {
    fn type_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "int",
            Value::Bool(_) => "bool",
            Value::Str(_) => "string",
            Value::Unit => "unit",
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Str(s) => f.write_str(s),
            Value::Unit => f.write_str("()"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
    Timeout,
    RuntimeError,
}

impl Verdict {
    /// Timeouts and runtime errors count as failures.
    pub fn is_failure(self) -> bool {
        self != Verdict::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub test_name: String,
    pub verdict: Verdict,
    pub steps_used: u64,
    pub message: String,
    pub log: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LinkError {
    #[error("function `{name}` is defined in both {first} and {second}")]
    DuplicateFunction {
        name: String,
        first: String,
        second: String,
    },
}

/// Lines executed during a run, keyed by module path.
pub type LineCoverage = BTreeMap<String, BTreeSet<u32>>;

/// A linked program plus its test modules, ready to run tests by name.
pub struct Suite<'a> {
    functions: BTreeMap<&'a str, (&'a str, &'a FunctionDef)>,
    tests: Vec<&'a str>,
}

impl<'a> Suite<'a> {
    /// Links `program` and `tests` into one function table. Test functions are
    /// the zero-argument functions named `test_*` found in `tests`, in module
    /// then declaration order.
    pub fn new<P, T>(program: P, tests: T) -> Result<Self, LinkError>
    where
        P: IntoIterator<Item = &'a SubjectModule>,
        T: IntoIterator<Item = &'a SubjectModule>,
    {
        let mut functions: BTreeMap<&'a str, (&'a str, &'a FunctionDef)> = BTreeMap::new();
        let mut add = |m: &'a SubjectModule| -> Result<(), LinkError> {
            for f in &m.functions {
                if let Some((first, _)) = functions.insert(&f.name.name, (&m.path, f)) {
                    return Err(LinkError::DuplicateFunction {
                        name: f.name.name.clone(),
                        first: first.to_string(),
                        second: m.path.clone(),
                    });
                }
            }
            Ok(())
        };
        for m in program {
            add(m)?;
        }
        let mut test_names = Vec::new();
        for m in tests {
            add(m)?;
            test_names.extend(
                m.functions
                    .iter()
                    .filter(|f| f.name.name.starts_with("test_") && f.params.is_empty())
                    .map(|f| f.name.name.as_str()),
            );
        }
        Ok(Suite {
            functions,
            tests: test_names,
        })
    }

    pub fn test_names(&self) -> &[&'a str] {
        &self.tests
    }

    pub fn run_test(&self, name: &str, step_budget: u64) -> TestOutcome {
        self.run_inner(name, step_budget, None)
    }

    /// Runs one test, recording every executed statement's line.
    pub fn run_test_traced(
        &self,
        name: &str,
        step_budget: u64,
        coverage: &mut LineCoverage,
    ) -> TestOutcome {
        self.run_inner(name, step_budget, Some(coverage))
    }

    pub fn run_all(&self, step_budget: u64) -> Vec<TestOutcome> {
        self.tests
            .iter()
            .map(|t| self.run_test(t, step_budget))
            .collect()
    }

    fn run_inner(
        &self,
        name: &str,
        step_budget: u64,
        coverage: Option<&mut LineCoverage>,
    ) -> TestOutcome {
        let mut m = Machine {
            suite: self,
            steps: 0,
            budget: step_budget.max(1),
            depth: 0,
            log: Vec::new(),
            coverage,
        };
        let result = m.call(name, Vec::new());
        let (verdict, message) = match result {
            Ok(_) => (Verdict::Pass, String::new()),
            Err(Fault::Fail(msg)) => (Verdict::Fail, msg),
            Err(Fault::Runtime(msg)) => (Verdict::RuntimeError, msg),
            Err(Fault::Timeout) => (
                Verdict::Timeout,
                format!("step budget of {} exhausted", m.budget),
            ),
        };
        TestOutcome {
            test_name: name.to_string(),
            verdict,
            steps_used: m.steps,
            message,
            log: m.log,
        }
    }
}

/// Runs every test of `tests` against `program`, one outcome per test in
/// declaration order.
pub fn run_test_suite(
    program: &[SubjectModule],
    tests: &[SubjectModule],
    step_budget: u64,
) -> Result<Vec<TestOutcome>, LinkError> {
    Ok(Suite::new(program, tests)?.run_all(step_budget))
}

enum Fault {
    Fail(String),
    Runtime(String),
    Timeout,
}

enum Flow {
    Normal,
    Break,
    Continue,
    Return(Value),
}

type Exec<T> = Result<T, Fault>;

struct Frame {
    module: String,
    scopes: Vec<Vec<(String, Value)>>,
}

impl Frame {
    fn lookup(&self, name: &str) -> Option<&Value> {
        self.scopes
            .iter()
            .rev()
            .flat_map(|s| s.iter().rev())
            .find(|(n, _)| n == name)
            .map(|(_, v)| v)
    }

    fn lookup_mut(&mut self, name: &str) -> Option<&mut Value> {
        self.scopes
            .iter_mut()
            .rev()
            .flat_map(|s| s.iter_mut().rev())
            .find(|(n, _)| n == name)
            .map(|(_, v)| v)
    }
}

struct Machine<'s, 'a, 'c> {
    suite: &'s Suite<'a>,
    steps: u64,
    budget: u64,
    depth: usize,
    log: Vec<String>,
    coverage: Option<&'c mut LineCoverage>,
}

fn runtime<T>(msg: String) -> Exec<T> {
    Err(Fault::Runtime(msg))
}

impl Machine<'_, '_, '_> {
    fn tick(&mut self) -> Exec<()> {
        self.steps += 1;
        if self.steps >= self.budget {
            self.steps = self.budget;
            return Err(Fault::Timeout);
        }
        Ok(())
    }

    fn call(&mut self, name: &str, args: Vec<Value>) -> Exec<Value> {
        let Some(&(module, f)) = self.suite.functions.get(name) else {
            return runtime(format!("link error: call to undefined function `{name}`"));
        };
        if f.params.len() != args.len() {
            return runtime(format!(
                "`{name}` expects {} argument(s), got {}",
                f.params.len(),
                args.len()
            ));
        }
        if self.depth >= MAX_CALL_DEPTH {
            return runtime(format!("call depth limit of {MAX_CALL_DEPTH} exceeded"));
        }
        self.depth += 1;
        let mut frame = Frame {
            module: module.to_string(),
            scopes: Vec::new(),
        };
        frame.scopes.push(
            f.params
                .iter()
                .map(|p| p.name.clone())
                .zip(args)
                .collect(),
        );
        let flow = self.block(&mut frame, &f.body);
        self.depth -= 1;
        Ok(match flow? {
            Flow::Return(v) => v,
            _ => Value::Unit,
        })
    }

    fn block(&mut self, frame: &mut Frame, b: &Block) -> Exec<Flow> {
        frame.scopes.push(Vec::new());
        let mut result = Ok(Flow::Normal);
        for s in &b.stmts {
            match self.stmt(frame, s) {
                Ok(Flow::Normal) => {}
                other => {
                    result = other;
                    break;
                }
            }
        }
        frame.scopes.pop();
        result
    }

    fn stmt(&mut self, frame: &mut Frame, s: &Stmt) -> Exec<Flow> {
        self.tick()?;
        if let Some(cov) = self.coverage.as_deref_mut() {
            cov.entry(frame.module.clone())
                .or_default()
                .insert(s.span.start_pos.line);
        }
        match &s.kind {
            StmtKind::Let { name, value } => {
                let v = self.expr(frame, value)?;
                frame
                    .scopes
                    .last_mut()
                    .expect("block scope")
                    .push((name.name.clone(), v));
                Ok(Flow::Normal)
            }
            StmtKind::Assign { target, value } => {
                let v = self.expr(frame, value)?;
                match frame.lookup_mut(&target.name) {
                    Some(slot) => {
                        *slot = v;
                        Ok(Flow::Normal)
                    }
                    None => runtime(format!("assignment to undeclared variable `{}`", target.name)),
                }
            }
            StmtKind::If {
                cond,
                then_block,
                else_branch,
            } => {
                if self.condition(frame, cond)? {
                    self.block(frame, then_block)
                } else {
                    match else_branch {
                        None => Ok(Flow::Normal),
                        Some(ElseBranch::Block(b)) => self.block(frame, b),
                        Some(ElseBranch::If(nested)) => self.stmt(frame, nested),
                    }
                }
            }
            StmtKind::While { cond, body } => {
                while self.condition(frame, cond)? {
                    match self.block(frame, body)? {
                        Flow::Break => break,
                        Flow::Return(v) => return Ok(Flow::Return(v)),
                        Flow::Normal | Flow::Continue => {}
                    }
                }
                Ok(Flow::Normal)
            }
            StmtKind::Return(value) => {
                let v = match value {
                    Some(e) => self.expr(frame, e)?,
                    None => Value::Unit,
                };
                Ok(Flow::Return(v))
            }
            StmtKind::Break => Ok(Flow::Break),
            StmtKind::Continue => Ok(Flow::Continue),
            StmtKind::Expr(e) => {
                self.expr(frame, e)?;
                Ok(Flow::Normal)
            }
        }
    }

    fn condition(&mut self, frame: &mut Frame, e: &Expr) -> Exec<bool> {
        match self.expr(frame, e)? {
            Value::Bool(b) => Ok(b),
            other => runtime(format!("condition must be bool, got {}", other.type_name())),
        }
    }

    fn expr(&mut self, frame: &mut Frame, e: &Expr) -> Exec<Value> {
        self.tick()?;
        match &e.kind {
            ExprKind::Int(v) => Ok(Value::Int(*v)),
            ExprKind::Bool(b) => Ok(Value::Bool(*b)),
            ExprKind::Str(s) => Ok(Value::Str(s.clone())),
            ExprKind::Var(name) => match frame.lookup(name) {
                Some(v) => Ok(v.clone()),
                None => runtime(format!("undefined variable `{name}`")),
            },
            ExprKind::Paren(inner) => self.expr(frame, inner),
            ExprKind::Unary { op, operand } => match (op, self.expr(frame, operand)?) {
                (UnaryOp::Neg, Value::Int(v)) => Ok(Value::Int(v.wrapping_neg())),
                (UnaryOp::Not, Value::Bool(b)) => Ok(Value::Bool(!b)),
                (op, v) => runtime(format!(
                    "operator `{}` not defined for {}",
                    op.symbol(),
                    v.type_name()
                )),
            },
            ExprKind::Binary { op, lhs, rhs, .. } => self.binary(frame, *op, lhs, rhs),
            ExprKind::Call { callee, args } => {
                let mut values = Vec::with_capacity(args.len());
                for a in args {
                    values.push(self.expr(frame, a)?);
                }
                self.builtin_or_call(&callee.name, values)
            }
        }
    }

    fn builtin_or_call(&mut self, name: &str, args: Vec<Value>) -> Exec<Value> {
        let arity = |n: usize| -> Exec<()> {
            if args.len() == n {
                Ok(())
            } else {
                runtime(format!("`{name}` expects {n} argument(s), got {}", args.len()))
            }
        };
        match name {
            "print" | "log" => {
                arity(1)?;
                self.log.push(args[0].to_string());
                Ok(Value::Int(0))
            }
            "assert_true" => {
                arity(1)?;
                match &args[0] {
                    Value::Bool(true) => Ok(Value::Unit),
                    Value::Bool(false) => Err(Fault::Fail(String::from("assert_true failed"))),
                    other => runtime(format!("assert_true expects bool, got {}", other.type_name())),
                }
            }
            "assert_eq" => {
                arity(2)?;
                if args[0] == args[1] {
                    Ok(Value::Unit)
                } else {
                    Err(Fault::Fail(format!(
                        "assert_eq failed: {} != {}",
                        args[0], args[1]
                    )))
                }
            }
            _ => self.call(name, args),
        }
    }

    fn binary(&mut self, frame: &mut Frame, op: BinaryOp, lhs: &Expr, rhs: &Expr) -> Exec<Value> {
        if matches!(op, BinaryOp::And | BinaryOp::Or) {
            let l = self.condition(frame, lhs)?;
            if (op == BinaryOp::And) != l {
                return Ok(Value::Bool(l));
            }
            return Ok(Value::Bool(self.condition(frame, rhs)?));
        }
        let l = self.expr(frame, lhs)?;
        let r = self.expr(frame, rhs)?;
        match op {
            BinaryOp::Eq => return Ok(Value::Bool(l == r)),
            BinaryOp::Ne => return Ok(Value::Bool(l != r)),
            _ => {}
        }
        if matches!(op, BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge) {
            let ord = match (&l, &r) {
                (Value::Int(a), Value::Int(b)) => a.cmp(b),
                (Value::Bool(a), Value::Bool(b)) => a.cmp(b),
                (Value::Str(a), Value::Str(b)) => a.cmp(b),
                _ => {
                    return runtime(format!(
                        "cannot compare {} with {}",
                        l.type_name(),
                        r.type_name()
                    ))
                }
            };
            return Ok(Value::Bool(match op {
                BinaryOp::Lt => ord.is_lt(),
                BinaryOp::Le => ord.is_le(),
                BinaryOp::Gt => ord.is_gt(),
                _ => ord.is_ge(),
            }));
        }
        let (Value::Int(a), Value::Int(b)) = (&l, &r) else {
            return runtime(format!(
                "operator `{}` not defined for {} and {}",
                op.symbol(),
                l.type_name(),
                r.type_name()
            ));
        };
        let (a, b) = (*a, *b);
        Ok(Value::Int(match op {
            BinaryOp::Add => a.wrapping_add(b),
            BinaryOp::Sub => a.wrapping_sub(b),
            BinaryOp::Mul => a.wrapping_mul(b),
            BinaryOp::Div | BinaryOp::Rem if b == 0 => {
                return runtime(String::from(if op == BinaryOp::Div {
                    "division by zero"
                } else {
                    "modulo by zero"
                }))
            }
            BinaryOp::Div => a.wrapping_div(b),
            _ => a.wrapping_rem(b),
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_source;
    use alloc::vec;

    fn run(program: &str, tests: &str, budget: u64) -> Vec<TestOutcome> {
        let p = parse_source(program, "src/p.mini").unwrap();
        let t = parse_source(tests, "tests/t.mini").unwrap();
        run_test_suite(&[p], &[t], budget).unwrap()
    }

    fn verdicts(outcomes: &[TestOutcome]) -> Vec<(&str, Verdict)> {
        outcomes
            .iter()
            .map(|o| (o.test_name.as_str(), o.verdict))
            .collect()
    }

    #[test]
    fn pass_and_fail() {
        let out = run(
            "",
            "fn test_a() { assert_true(true); } fn test_b() { assert_eq(1, 2); }",
            DEFAULT_STEP_BUDGET,
        );
        assert_eq!(
            verdicts(&out),
            vec![("test_a", Verdict::Pass), ("test_b", Verdict::Fail)]
        );
    }

    #[test]
    fn infinite_loop_times_out_at_budget() {
        let out = run(
            "fn spin() { while (true) {} }",
            "fn test_c() { spin(); }",
            100_000,
        );
        assert_eq!(out[0].verdict, Verdict::Timeout);
        assert_eq!(out[0].steps_used, 100_000);
    }

    #[test]
    fn division_by_zero_is_runtime_error() {
        let out = run(
            "fn d(a, b) { return a / b; } fn m(a, b) { return a % b; }",
            "fn test_d() { d(1, 0); } fn test_m() { m(1, 0); } fn test_ok() { assert_eq(d(7, 2), 3); }",
            DEFAULT_STEP_BUDGET,
        );
        assert_eq!(
            verdicts(&out),
            vec![
                ("test_d", Verdict::RuntimeError),
                ("test_m", Verdict::RuntimeError),
                ("test_ok", Verdict::Pass)
            ]
        );
    }

    #[test]
    fn undefined_callee_is_per_test_error() {
        let out = run(
            "",
            "fn test_x() { missing(); } fn test_y() { assert_true(true); }",
            DEFAULT_STEP_BUDGET,
        );
        assert_eq!(out[0].verdict, Verdict::RuntimeError);
        assert!(out[0].message.contains("link error"));
        assert_eq!(out[1].verdict, Verdict::Pass);
    }

    #[test]
    fn duplicate_function_across_modules_is_link_error() {
        let p = parse_source("fn f() {}", "src/p.mini").unwrap();
        let t = parse_source("fn f() {}", "tests/t.mini").unwrap();
        assert!(matches!(
            run_test_suite(&[p], &[t], 10),
            Err(LinkError::DuplicateFunction { .. })
        ));
    }

    #[test]
    fn overflow_wraps() {
        let out = run(
            "fn big() { return 9223372036854775807; }",
            "fn test_w() { assert_eq(big() + 1, -9223372036854775807 - 1); }",
            DEFAULT_STEP_BUDGET,
        );
        assert_eq!(out[0].verdict, Verdict::Pass, "{}", out[0].message);
    }

    #[test]
    fn control_flow_and_scoping() {
        let program = "
fn sum_to(n) {
    let s = 0;
    let i = 0;
    while (true) {
        i = i + 1;
        if (i > n) { break; }
        if (i % 2 == 0) { continue; }
        s = s + i;
    }
    return s;
}
fn shadow() {
    let x = 1;
    if (true) { let x = 2; x = 3; }
    return x;
}";
        let out = run(
            program,
            "fn test_s() { assert_eq(sum_to(5), 9); } fn test_h() { assert_eq(shadow(), 1); }",
            DEFAULT_STEP_BUDGET,
        );
        assert!(out.iter().all(|o| o.verdict == Verdict::Pass), "{out:?}");
    }

    #[test]
    fn log_sink_and_unbounded_recursion() {
        let out = run(
            "fn r(n) { return r(n + 1); }",
            "fn test_l() { log(\"hi\"); print(3); } fn test_r() { r(0); }",
            DEFAULT_STEP_BUDGET,
        );
        assert_eq!(out[0].log, vec!["hi".to_string(), "3".to_string()]);
        assert_eq!(out[1].verdict, Verdict::RuntimeError);
    }

    #[test]
    fn non_test_functions_are_not_run() {
        let out = run(
            "",
            "fn helper() { assert_true(false); } fn test_z(a) {} fn test_ok() {}",
            DEFAULT_STEP_BUDGET,
        );
        assert_eq!(verdicts(&out), vec![("test_ok", Verdict::Pass)]);
    }

    #[test]
    fn coverage_records_statement_lines() {
        let p = parse_source("fn f(x) {\n    if (x) {\n        return 1;\n    }\n    return 2;\n}\n", "src/p.mini").unwrap();
        let t = parse_source("fn test_f() { f(false); }", "tests/t.mini").unwrap();
        let suite = Suite::new([&p], [&t]).unwrap();
        let mut cov = LineCoverage::new();
        suite.run_test_traced("test_f", 1000, &mut cov);
        let lines: Vec<u32> = cov["src/p.mini"].iter().copied().collect();
        assert_eq!(lines, vec![2, 5]);
    }
}
