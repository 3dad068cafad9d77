//! Change analysis: surface at most one live mutant per changed, covered
//! line, and at most seven per file.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::diff::{ChangeSet, LineKind};
use crate::eval::{evaluate_mutant, reverify_kill, EvalError};
use crate::exec::Executor;
use crate::lang::{LinkError, DEFAULT_STEP_BUDGET};
use crate::mutagen::{
    enumerate_with_rejections, Mutant, MutantStatus, NodeKind, NotApplicable, OperatorKind,
    SuppressionConfig,
};
use crate::project::Project;
use crate::selection::{
    score_with, select_with, ContextKey, FeedbackVerdict, OperatorStats, OutcomeEvent, ScoreWeights,
    SelectionError,
};

pub const MAX_FINDINGS_PER_FILE: usize = 7;

/// Covered head-version lines per file.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageMap {
    pub files: BTreeMap<String, BTreeSet<u32>>,
}

impl CoverageMap {
    pub fn insert(&mut self, path: &str, line: u32) {
        self.files.entry(String::from(path)).or_default().insert(line);
    }

    pub fn covered(&self, path: &str) -> Option<&BTreeSet<u32>> {
        self.files.get(path)
    }
}

/// Added or edited head lines that are covered, per file. Files with no
/// such line are omitted.
pub fn changed_covered_lines(
    cs: &ChangeSet,
    cov: &CoverageMap,
) -> BTreeMap<String, BTreeSet<u32>> {
    let mut out = BTreeMap::new();
    for f in &cs.files {
        let Some(path) = f.new_path.as_deref() else {
            continue;
        };
        let Some(covered) = cov.covered(path) else {
            continue;
        };
        let lines: BTreeSet<u32> = f.added_lines().intersection(covered).copied().collect();
        if !lines.is_empty() {
            out.insert(String::from(path), lines);
        }
    }
    out
}

fn changed_lines(cs: &ChangeSet) -> BTreeMap<String, BTreeSet<u32>> {
    cs.files
        .iter()
        .filter_map(|f| Some((f.new_path.clone()?, f.added_lines())))
        .filter(|(_, l)| !l.is_empty())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChangeConfig {
    pub suppression: SuppressionConfig,
    pub step_budget: u64,
    pub weights: ScoreWeights,
    pub max_findings_per_file: usize,
}

impl Default for ChangeConfig {
    fn default() -> Self {
        ChangeConfig {
            suppression: SuppressionConfig::default(),
            step_budget: DEFAULT_STEP_BUDGET,
            weights: ScoreWeights::default(),
            max_findings_per_file: MAX_FINDINGS_PER_FILE,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub mutant: Mutant,
    pub file: String,
    pub line: u32,
    pub surfaced_rank: usize,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MutantEvaluation {
    pub mutant_id: String,
    pub file: String,
    pub line: u32,
    pub operator: OperatorKind,
    pub node_kind: NodeKind,
    pub original_snippet: String,
    pub replacement_snippet: String,
    pub status: MutantStatus,
    pub score: f64,
    pub tests_run: Vec<String>,
    pub killing_tests: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub eligible_lines: usize,
    pub lines_without_mutant: usize,
    pub suppressed: usize,
    pub generated: usize,
    pub killed: usize,
    pub live: usize,
    pub unevaluated: usize,
    pub surfaced: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FindingsReport {
    pub change_id: String,
    /// Surfaced findings per file, rank order.
    pub findings: BTreeMap<String, Vec<Finding>>,
    /// Every evaluated mutant, ordered by file then line.
    pub evaluations: Vec<MutantEvaluation>,
    pub summary: Summary,
}

impl FindingsReport {
    pub fn finding(&self, mutant_id: &str) -> Option<&Finding> {
        self.findings
            .values()
            .flatten()
            .find(|f| f.mutant.id == mutant_id)
    }

    pub fn all_findings(&self) -> impl Iterator<Item = &Finding> {
        self.findings.values().flatten()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ChangeError {
    #[error("baseline test failures on the unmutated head: {}", failing.join(", "))]
    BaselineFailure { failing: Vec<String> },
    #[error("diff does not match {side} version of {path} at line {line}")]
    DiffMismatch {
        side: &'static str,
        path: String,
        line: u32,
    },
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Selection(#[from] SelectionError),
    #[error("recorded killing test {test} does not fail on mutant {mutant}")]
    KillNotReproducible { mutant: String, test: String },
    #[error("mutant {0} is not a finding of this report")]
    UnknownMutant(String),
}

/// Checks the diff's context and removed lines against `base` and its
/// context and added lines against `head`, for files both projects know.
fn check_diff(base: &Project, head: &Project, diff: &ChangeSet) -> Result<(), ChangeError> {
    let module_text = |p: &Project, path: &str| -> Option<String> {
        p.sources
            .iter()
            .chain(p.tests.iter())
            .find(|m| m.path == path)
            .map(|m| m.source_text.clone())
    };
    for f in &diff.files {
        let sides = [
            ("base", base, f.old_path.as_deref()),
            ("head", head, f.new_path.as_deref()),
        ];
        for (side, project, path) in sides {
            let Some(path) = path else { continue };
            let Some(text) = module_text(project, path) else {
                continue;
            };
            let lines: Vec<&str> = text.lines().collect();
            for h in &f.hunks {
                for l in &h.lines {
                    let number = match (side, l.kind) {
                        ("base", LineKind::Context | LineKind::Removed) => l.old_line,
                        ("head", LineKind::Context | LineKind::Added) => l.new_line,
                        _ => None,
                    };
                    let Some(n) = number else { continue };
                    if lines.get(n as usize - 1).copied() != Some(l.text.as_str()) {
                        return Err(ChangeError::DiffMismatch {
                            side,
                            path: String::from(path),
                            line: n,
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

/// Runs the change-review flow and returns the report plus the operator
/// statistics updated with this run's outcomes.
#[allow(clippy::too_many_arguments)]
pub fn analyze_change<E: Executor>(
    change_id: &str,
    base: &Project,
    head: &Project,
    diff: &ChangeSet,
    cov: &CoverageMap,
    stats: &OperatorStats,
    cfg: &ChangeConfig,
    exec: &E,
) -> Result<(FindingsReport, OperatorStats), ChangeError> {
    check_diff(base, head, diff)?;
    let baseline = head.run_tests(cfg.step_budget)?;
    let failing: Vec<String> = baseline
        .iter()
        .filter(|o| o.verdict.is_failure())
        .map(|o| o.test_name.clone())
        .collect();
    if !failing.is_empty() {
        return Err(ChangeError::BaselineFailure { failing });
    }
    let passing: BTreeSet<String> = baseline.into_iter().map(|o| o.test_name).collect();

    let eligible = if cfg.suppression.suppress_uncovered {
        changed_covered_lines(diff, cov)
    } else {
        changed_lines(diff)
    };

    let mut summary = Summary::default();
    let mut selected: Vec<(Mutant, f64)> = Vec::new();
    for (path, lines) in &eligible {
        let Some(module) = head.source(path) else {
            continue;
        };
        summary.eligible_lines += lines.len();
        let (mutants, rejected) = enumerate_with_rejections(module, lines, &cfg.suppression)
            .expect("non-empty line set");
        summary.suppressed += rejected
            .iter()
            .filter(|r| r.reason == NotApplicable::Suppressed)
            .count();
        let mut by_line: BTreeMap<u32, Vec<Mutant>> = BTreeMap::new();
        for m in mutants {
            by_line.entry(m.line()).or_default().push(m);
        }
        summary.lines_without_mutant += lines.len() - by_line.len();
        for candidates in by_line.values() {
            if let Some(m) = select_with(candidates, stats, cfg.weights) {
                let score = score_with(stats, ContextKey::of(m), cfg.weights);
                selected.push((m.clone(), score));
            }
        }
    }

    let results = exec.map(&selected, |(m, _)| {
        evaluate_mutant(head, m, &passing, cfg.step_budget, true)
    });

    let mut next_stats = stats.clone();
    let mut evaluations = Vec::with_capacity(selected.len());
    let mut live: BTreeMap<String, Vec<(Mutant, f64)>> = BTreeMap::new();
    for ((mut mutant, score), result) in selected.into_iter().zip(results) {
        let eval = result?;
        let key = ContextKey::of(&mutant);
        next_stats.record_outcome(key, OutcomeEvent::Generated)?;
        summary.generated += 1;
        mutant.status = eval.status;
        match eval.status {
            MutantStatus::Killed => {
                let test = &eval.killing_tests[0];
                if !reverify_kill(head, &mutant, test, cfg.step_budget)? {
                    return Err(ChangeError::KillNotReproducible {
                        mutant: mutant.id.clone(),
                        test: test.clone(),
                    });
                }
                next_stats.record_outcome(key, OutcomeEvent::Killed)?;
                summary.killed += 1;
            }
            MutantStatus::Live => {
                next_stats.record_outcome(key, OutcomeEvent::Survived)?;
                summary.live += 1;
            }
            MutantStatus::Unknown => summary.unevaluated += 1,
        }
        evaluations.push(MutantEvaluation {
            mutant_id: mutant.id.clone(),
            file: mutant.point.path.clone(),
            line: mutant.line(),
            operator: mutant.operator,
            node_kind: mutant.point.node_kind,
            original_snippet: mutant.point.original_snippet.clone(),
            replacement_snippet: mutant.replacement_snippet.clone(),
            status: mutant.status,
            score,
            tests_run: eval.tests_run,
            killing_tests: eval.killing_tests,
        });
        if mutant.status == MutantStatus::Live {
            live.entry(mutant.point.path.clone())
                .or_default()
                .push((mutant, score));
        }
    }

    let mut findings = BTreeMap::new();
    for (path, mut candidates) in live {
        candidates.sort_by(|(a, sa), (b, sb)| {
            sb.partial_cmp(sa)
                .unwrap_or(core::cmp::Ordering::Equal)
                .then(a.line().cmp(&b.line()))
        });
        let surfaced: Vec<Finding> = candidates
            .into_iter()
            .take(cfg.max_findings_per_file)
            .enumerate()
            .map(|(i, (mutant, score))| Finding {
                file: path.clone(),
                line: mutant.line(),
                surfaced_rank: i + 1,
                score,
                mutant,
            })
            .collect();
        summary.surfaced += surfaced.len();
        findings.insert(path, surfaced);
    }

    Ok((
        FindingsReport {
            change_id: String::from(change_id),
            findings,
            evaluations,
            summary,
        },
        next_stats,
    ))
}

/// Records reviewer feedback on a surfaced finding.
pub fn apply_feedback(
    report: &FindingsReport,
    mutant_id: &str,
    verdict: FeedbackVerdict,
    stats: &OperatorStats,
) -> Result<OperatorStats, ChangeError> {
    let finding = report
        .finding(mutant_id)
        .ok_or_else(|| ChangeError::UnknownMutant(String::from(mutant_id)))?;
    let mut next = stats.clone();
    next.record_outcome(ContextKey::of(&finding.mutant), verdict.into())?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff::parse_unified_diff;

    #[test]
    fn covered_intersection() {
        let d = "--- a/f\n+++ b/f\n@@ -9,0 +10,3 @@\n+a\n+b\n+c\n";
        let cs = parse_unified_diff(d).unwrap();
        let mut cov = CoverageMap::default();
        for l in [11, 12, 50] {
            cov.insert("f", l);
        }
        let got = changed_covered_lines(&cs, &cov);
        assert_eq!(got["f"].iter().copied().collect::<Vec<_>>(), [11, 12]);
    }

    #[test]
    fn uncovered_lines_drop_out() {
        let d = "--- a/f\n+++ b/f\n@@ -4,0 +5,1 @@\n+a\n";
        let cs = parse_unified_diff(d).unwrap();
        let mut cov = CoverageMap::default();
        cov.files.insert("f".into(), BTreeSet::new());
        assert!(changed_covered_lines(&cs, &cov).is_empty());
    }

    #[test]
    fn only_covered_files_contribute() {
        let d = "--- a/f\n+++ b/f\n@@ -1,0 +2,1 @@\n+a\n--- a/g\n+++ b/g\n@@ -1,0 +2,1 @@\n+b\n";
        let cs = parse_unified_diff(d).unwrap();
        let mut cov = CoverageMap::default();
        cov.insert("g", 2);
        let got = changed_covered_lines(&cs, &cov);
        assert_eq!(got.keys().collect::<Vec<_>>(), ["g"]);
    }
}
