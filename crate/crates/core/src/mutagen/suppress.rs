use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::MutationPoint;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuppressionConfig {
    /// Case-sensitive glob patterns (`*` and `?`) matched against callee names.
    pub callee_denylist: Vec<String>,
    /// Only mutate lines that are covered by tests.
    pub suppress_uncovered: bool,
}

impl Default for SuppressionConfig {
    fn default() -> Self {
        SuppressionConfig {
            callee_denylist: ["log", "print", "debug*", "trace*"]
                .into_iter()
                .map(String::from)
                .collect(),
            suppress_uncovered: true,
        }
    }
}

impl SuppressionConfig {
    pub fn is_denied(&self, callee: &str) -> bool {
        self.callee_denylist.iter().any(|p| glob_match(p, callee))
    }
}

/// Whether mutating `point` is unproductive under `cfg`, with a reason.
pub fn is_suppressed(point: &MutationPoint, cfg: &SuppressionConfig) -> (bool, String) {
    match &point.enclosing_callee {
        Some(callee) if cfg.is_denied(callee) => (true, String::from("logging callee")),
        _ => (false, String::new()),
    }
}

/// Glob match supporting `*` (any run) and `?` (any single char).
pub fn glob_match(pattern: &str, text: &str) -> bool {
    let p: Vec<char> = pattern.chars().collect();
    let t: Vec<char> = text.chars().collect();
    let (mut pi, mut ti) = (0, 0);
    let mut star: Option<(usize, usize)> = None;
    while ti < t.len() {
        if pi < p.len() && (p[pi] == '?' || p[pi] == t[ti]) {
            pi += 1;
            ti += 1;
        } else if pi < p.len() && p[pi] == '*' {
            star = Some((pi, ti));
            pi += 1;
        } else if let Some((sp, st)) = star {
            pi = sp + 1;
            ti = st + 1;
            star = Some((sp, st + 1));
        } else {
            return false;
        }
    }
    p[pi..].iter().all(|&c| c == '*')
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_source;
    use crate::mutagen::{discover_points, NodeKind};

    fn stmt_point(src: &str) -> MutationPoint {
        let m = parse_source(src, "m").unwrap();
        discover_points(&m, &[1].into_iter().collect())
            .unwrap()
            .into_iter()
            .find(|p| p.node_kind == NodeKind::Statement)
            .unwrap()
    }

    #[test]
    fn logging_statements() {
        let cfg = SuppressionConfig::default();
        assert_eq!(
            is_suppressed(&stmt_point("fn f(){ log(\"x\"); }"), &cfg),
            (true, String::from("logging callee"))
        );
        assert_eq!(
            is_suppressed(&stmt_point("fn f(){ compute(1); }"), &cfg),
            (false, String::new())
        );
        assert_eq!(
            is_suppressed(&stmt_point("fn f(){ trace_event(1); }"), &cfg),
            (true, String::from("logging callee"))
        );
    }

    #[test]
    fn globs() {
        assert!(glob_match("trace*", "trace"));
        assert!(glob_match("trace*", "trace_event"));
        assert!(!glob_match("trace*", "Trace"));
        assert!(glob_match("*_log", "audit_log"));
        assert!(glob_match("a?c", "abc"));
        assert!(!glob_match("log", "logger"));
        assert!(glob_match("*a*b*", "xxaybzz"));
    }
}
