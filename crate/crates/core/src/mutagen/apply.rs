use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt::Write;

use sha2::{Digest, Sha256};

use super::{
    is_suppressed, MutagenError, Mutant, MutantStatus, MutationPoint, NodeKind, NotApplicable,
    OperatorKind, PointDetail, StmtClass, SuppressionConfig,
};
use super::discover::discover_points;
use crate::lang::{parse_source, BinaryOp, SubjectModule};

/// Operators that can act on `point`, with their variant counts.
pub fn applicable_operators(point: &MutationPoint) -> Vec<(OperatorKind, usize)> {
    match (&point.node_kind, &point.detail) {
        (NodeKind::BinaryArith, _) => vec![(OperatorKind::Aor, 4)],
        (NodeKind::BinaryLogical, _) => vec![(OperatorKind::Lcr, 1)],
        (NodeKind::BinaryRelational, _) => vec![(OperatorKind::Ror, 5)],
        (
            NodeKind::BoolExpr | NodeKind::NumExpr,
            PointDetail::Typed {
                double_negation: false,
                ..
            },
        ) => vec![(OperatorKind::Uoi, 1)],
        (NodeKind::Statement, PointDetail::Statement { class }) if sbr_exclusion(*class).is_none() => {
            vec![(OperatorKind::Sbr, 1)]
        }
        _ => Vec::new(),
    }
}

fn sbr_exclusion(class: StmtClass) -> Option<NotApplicable> {
    match class {
        StmtClass::Let => Some(NotApplicable::Declaration),
        StmtClass::Return | StmtClass::Break | StmtClass::Continue => {
            Some(NotApplicable::ControlFlowStatement)
        }
        _ => None,
    }
}

/// Replacement operators in table order, excluding the original.
fn replacements(op: BinaryOp) -> Vec<BinaryOp> {
    let table: &[BinaryOp] = match op.class() {
        crate::lang::OpClass::Arithmetic => &BinaryOp::ARITHMETIC,
        crate::lang::OpClass::Relational => &BinaryOp::RELATIONAL,
        crate::lang::OpClass::Logical => &BinaryOp::LOGICAL,
    };
    table.iter().copied().filter(|o| *o != op).collect()
}

/// Stable identity of a mutant: a hash over its file, location, operator
/// and snippet texts.
pub fn mutant_id(point: &MutationPoint, op: OperatorKind, replacement: &str) -> String {
    let mut h = Sha256::new();
    h.update(point.path.as_bytes());
    h.update([0]);
    h.update(format!("{}:{}", point.span.start, point.span.end).as_bytes());
    h.update([0]);
    h.update(op.name().as_bytes());
    h.update([0]);
    h.update(point.original_snippet.as_bytes());
    h.update([0]);
    h.update(replacement.as_bytes());
    let digest = h.finalize();
    let mut id = String::with_capacity(16);
    for b in &digest[..8] {
        let _ = write!(id, "{b:02x}");
    }
    id
}

/// Text that replaces `point.span`, or why there is none.
fn replacement_text(
    point: &MutationPoint,
    op: OperatorKind,
    variant: usize,
) -> Result<String, NotApplicable> {
    match (op, &point.node_kind, &point.detail) {
        (
            OperatorKind::Aor | OperatorKind::Lcr | OperatorKind::Ror,
            NodeKind::BinaryArith | NodeKind::BinaryLogical | NodeKind::BinaryRelational,
            PointDetail::Binary { op: bin, op_span },
        ) => {
            let expected = match bin.class() {
                crate::lang::OpClass::Arithmetic => OperatorKind::Aor,
                crate::lang::OpClass::Logical => OperatorKind::Lcr,
                crate::lang::OpClass::Relational => OperatorKind::Ror,
            };
            if op != expected {
                return Err(NotApplicable::WrongNodeKind);
            }
            let new_op = *replacements(*bin)
                .get(variant)
                .ok_or(NotApplicable::WrongNodeKind)?;
            let cut = op_span.start - point.span.start;
            let cut_end = op_span.end - point.span.start;
            let s = &point.original_snippet;
            Ok(format!("{}{}{}", &s[..cut], new_op.symbol(), &s[cut_end..]))
        }
        (
            OperatorKind::Uoi,
            NodeKind::BoolExpr | NodeKind::NumExpr,
            PointDetail::Typed {
                needs_parens,
                double_negation,
            },
        ) => {
            if variant != 0 {
                return Err(NotApplicable::WrongNodeKind);
            }
            if *double_negation {
                return Err(NotApplicable::DoubleNegation);
            }
            let sym = if point.node_kind == NodeKind::BoolExpr {
                "!"
            } else {
                "-"
            };
            Ok(if *needs_parens {
                format!("{sym}({})", point.original_snippet)
            } else {
                format!("{sym}{}", point.original_snippet)
            })
        }
        (OperatorKind::Sbr, NodeKind::Statement, PointDetail::Statement { class }) => {
            if variant != 0 {
                return Err(NotApplicable::WrongNodeKind);
            }
            match sbr_exclusion(*class) {
                Some(reason) => Err(reason),
                None => Ok(String::new()),
            }
        }
        _ => Err(NotApplicable::WrongNodeKind),
    }
}

/// Applies one operator variant at `point`, producing a mutant whose source
/// differs from the original only inside the point's span and still parses.
/// Suppression is not consulted; see [`Mutator`].
pub fn apply_operator(
    module: &SubjectModule,
    point: &MutationPoint,
    op: OperatorKind,
    variant: usize,
) -> Result<Mutant, NotApplicable> {
    let span = &point.span;
    if span.end > module.source_text.len()
        || module.source_text.get(span.start..span.end) != Some(point.original_snippet.as_str())
    {
        return Err(NotApplicable::WrongNodeKind);
    }
    let replacement = replacement_text(point, op, variant)?;
    let mut mutant = Mutant {
        id: mutant_id(point, op, &replacement),
        point: point.clone(),
        operator: op,
        variant,
        replacement_snippet: replacement,
        mutated_source: String::new(),
        status: MutantStatus::Unknown,
    };
    mutant.mutated_source = mutant.splice(&module.source_text);
    if parse_source(&mutant.mutated_source, &module.path).is_err() {
        return Err(NotApplicable::WouldNotParse);
    }
    Ok(mutant)
}

/// Applies operators under a suppression configuration.
#[derive(Clone, Debug, Default)]
pub struct Mutator {
    pub cfg: SuppressionConfig,
}

impl Mutator {
    pub fn new(cfg: SuppressionConfig) -> Self {
        Mutator { cfg }
    }

    pub fn apply(
        &self,
        module: &SubjectModule,
        point: &MutationPoint,
        op: OperatorKind,
        variant: usize,
    ) -> Result<Mutant, NotApplicable> {
        if is_suppressed(point, &self.cfg).0 {
            return Err(NotApplicable::Suppressed);
        }
        apply_operator(module, point, op, variant)
    }
}

/// An operator that was considered at a point but not applied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rejection {
    pub point: MutationPoint,
    pub operator: Option<OperatorKind>,
    pub reason: NotApplicable,
}

/// Every valid, unsuppressed mutant on `lines`, ordered by line, column,
/// operator (AOR < LCR < ROR < UOI < SBR) and variant.
pub fn enumerate_all_mutants(
    module: &SubjectModule,
    lines: &BTreeSet<u32>,
    cfg: &SuppressionConfig,
) -> Result<Vec<Mutant>, MutagenError> {
    enumerate_with_rejections(module, lines, cfg).map(|(m, _)| m)
}

/// Like [`enumerate_all_mutants`], also returning why each excluded
/// point/operator pair produced nothing.
pub fn enumerate_with_rejections(
    module: &SubjectModule,
    lines: &BTreeSet<u32>,
    cfg: &SuppressionConfig,
) -> Result<(Vec<Mutant>, Vec<Rejection>), MutagenError> {
    let mut mutants = Vec::new();
    let mut rejected = Vec::new();
    for point in discover_points(module, lines)? {
        if is_suppressed(&point, cfg).0 {
            rejected.push(Rejection {
                point,
                operator: None,
                reason: NotApplicable::Suppressed,
            });
            continue;
        }
        let ops = applicable_operators(&point);
        if ops.is_empty() {
            let (op, reason) = match (&point.node_kind, &point.detail) {
                (NodeKind::Statement, PointDetail::Statement { class }) => (
                    OperatorKind::Sbr,
                    sbr_exclusion(*class).unwrap_or(NotApplicable::WrongNodeKind),
                ),
                _ => (OperatorKind::Uoi, NotApplicable::DoubleNegation),
            };
            rejected.push(Rejection {
                point,
                operator: Some(op),
                reason,
            });
            continue;
        }
        for (op, count) in ops {
            for variant in 0..count {
                match apply_operator(module, &point, op, variant) {
                    Ok(m) => mutants.push(m),
                    Err(reason) => rejected.push(Rejection {
                        point: point.clone(),
                        operator: Some(op),
                        reason,
                    }),
                }
            }
        }
    }
    mutants.sort_by(|a, b| {
        (a.line(), a.column(), a.operator, a.variant, core::cmp::Reverse(a.point.span.end)).cmp(&(
            b.line(),
            b.column(),
            b.operator,
            b.variant,
            core::cmp::Reverse(b.point.span.end),
        ))
    });
    Ok((mutants, rejected))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_source;

    fn module(src: &str) -> SubjectModule {
        parse_source(src, "src/m.mini").unwrap()
    }

    fn point_for(m: &SubjectModule, kind: NodeKind, snippet: &str) -> MutationPoint {
        let lines: BTreeSet<u32> = (1..=m.source_text.lines().count() as u32).collect();
        discover_points(m, &lines)
            .unwrap()
            .into_iter()
            .find(|p| p.node_kind == kind && p.original_snippet == snippet)
            .unwrap_or_else(|| panic!("no {kind} point for {snippet}"))
    }

    #[test]
    fn ror_variant_order() {
        let m = module("fn f(a, b) { return a < b; }");
        let p = point_for(&m, NodeKind::BinaryRelational, "a < b");
        assert_eq!(applicable_operators(&p), vec![(OperatorKind::Ror, 5)]);
        let got: Vec<String> = (0..5)
            .map(|v| apply_operator(&m, &p, OperatorKind::Ror, v).unwrap().replacement_snippet)
            .collect();
        assert_eq!(got, ["a <= b", "a > b", "a >= b", "a == b", "a != b"]);
    }

    #[test]
    fn aor_keeps_spacing_and_locality() {
        let m = module("fn f(a, b) {\n    return a  *b;\n}\n");
        let p = point_for(&m, NodeKind::BinaryArith, "a  *b");
        let mutant = apply_operator(&m, &p, OperatorKind::Aor, 0).unwrap();
        assert_eq!(mutant.replacement_snippet, "a  +b");
        assert_eq!(mutant.mutated_source, "fn f(a, b) {\n    return a  +b;\n}\n");
    }

    #[test]
    fn sbr_constraints() {
        let m = module("fn f() { let x = f(); while (true) { break; } x = 1; return x; }");
        let let_p = point_for(&m, NodeKind::Statement, "let x = f();");
        assert_eq!(
            apply_operator(&m, &let_p, OperatorKind::Sbr, 0),
            Err(NotApplicable::Declaration)
        );
        let brk = point_for(&m, NodeKind::Statement, "break;");
        assert_eq!(
            apply_operator(&m, &brk, OperatorKind::Sbr, 0),
            Err(NotApplicable::ControlFlowStatement)
        );
        let ret = point_for(&m, NodeKind::Statement, "return x;");
        assert!(applicable_operators(&ret).is_empty());
        let assign = point_for(&m, NodeKind::Statement, "x = 1;");
        assert_eq!(applicable_operators(&assign), vec![(OperatorKind::Sbr, 1)]);
        let mutant = apply_operator(&m, &assign, OperatorKind::Sbr, 0).unwrap();
        assert_eq!(mutant.replacement_snippet, "");
        assert!(mutant.mutated_source.contains("}  return x;"));
    }

    #[test]
    fn uoi_wraps_compound_expressions() {
        let m = module("fn f(a, b) { if (a && b) { return 1; } return 0; }");
        let p = point_for(&m, NodeKind::BoolExpr, "a && b");
        let mutant = apply_operator(&m, &p, OperatorKind::Uoi, 0).unwrap();
        assert_eq!(mutant.replacement_snippet, "!(a && b)");
        let p = point_for(&m, NodeKind::BoolExpr, "a");
        assert_eq!(
            apply_operator(&m, &p, OperatorKind::Uoi, 0).unwrap().replacement_snippet,
            "!a"
        );
    }

    #[test]
    fn wrong_operator_is_rejected() {
        let m = module("fn f(a, b) { return a < b; }");
        let p = point_for(&m, NodeKind::BinaryRelational, "a < b");
        assert_eq!(
            apply_operator(&m, &p, OperatorKind::Aor, 0),
            Err(NotApplicable::WrongNodeKind)
        );
        assert_eq!(
            apply_operator(&m, &p, OperatorKind::Ror, 5),
            Err(NotApplicable::WrongNodeKind)
        );
    }

    #[test]
    fn suppressed_through_mutator() {
        let m = module("fn f(x) { log(x + 1); }");
        let p = point_for(&m, NodeKind::BinaryArith, "x + 1");
        let mutator = Mutator::default();
        assert_eq!(
            mutator.apply(&m, &p, OperatorKind::Aor, 0),
            Err(NotApplicable::Suppressed)
        );
        assert!(apply_operator(&m, &p, OperatorKind::Aor, 0).is_ok());
    }

    #[test]
    fn ids_are_stable_and_distinct() {
        let m = module("fn f(a, b) { return a < b; }");
        let p = point_for(&m, NodeKind::BinaryRelational, "a < b");
        let a = apply_operator(&m, &p, OperatorKind::Ror, 0).unwrap();
        let b = apply_operator(&m, &p, OperatorKind::Ror, 0).unwrap();
        let c = apply_operator(&m, &p, OperatorKind::Ror, 1).unwrap();
        assert_eq!(a.id, b.id);
        assert_ne!(a.id, c.id);
        assert_eq!(a.id.len(), 16);
    }

    #[test]
    fn enumerate_if_line() {
        let m = module("fn f(a, b, x) { if (a && b) { x = x + 1; } return x; }\n");
        let lines: BTreeSet<u32> = [1].into_iter().collect();
        let all = enumerate_all_mutants(&m, &lines, &SuppressionConfig::default()).unwrap();
        let count = |op| all.iter().filter(|m| m.operator == op).count();
        assert_eq!(count(OperatorKind::Lcr), 1);
        assert_eq!(count(OperatorKind::Aor), 4);
        // !(a && b), !a, !b, -(x + 1), -x, -1, and -x in `return x;`
        assert_eq!(count(OperatorKind::Uoi), 7);
        // the whole `if` and the assignment
        assert_eq!(count(OperatorKind::Sbr), 2);
        assert_eq!(count(OperatorKind::Ror), 0);
    }

    #[test]
    fn logging_line_yields_nothing() {
        let m = module("fn f(x) {\n    log(x);\n}\n");
        let lines: BTreeSet<u32> = [2].into_iter().collect();
        let (all, rejected) =
            enumerate_with_rejections(&m, &lines, &SuppressionConfig::default()).unwrap();
        assert!(all.is_empty());
        assert!(rejected.iter().all(|r| r.reason == NotApplicable::Suppressed));
        assert!(!rejected.is_empty());
    }

    #[test]
    fn empty_body_yields_nothing() {
        let m = module("fn f() {\n}\n");
        let lines: BTreeSet<u32> = [1, 2].into_iter().collect();
        assert!(enumerate_all_mutants(&m, &lines, &SuppressionConfig::default())
            .unwrap()
            .is_empty());
    }
}
