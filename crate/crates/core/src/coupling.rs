//! Fault coupling of mutants to real bugs, and per-line mutant redundancy
//! (majority fate).
//!
//! A bug is a (buggy, fixed) project pair plus the fixing diff. Mutants are
//! enumerated on every line inside the fix's hunk windows in both versions;
//! a mutant present in both is coupled when it survives the buggy version's
//! own tests but is killed in the fixed version, strictly only by tests that
//! fail on the buggy code.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::diff::ChangeSet;
use crate::eval::{evaluate_mutant, EvalError};
use crate::exec::Executor;
use crate::lang::{LinkError, DEFAULT_STEP_BUDGET};
use crate::metrics::is_test_path;
use crate::mutagen::{
    enumerate_with_rejections, Mutant, MutantStatus, NotApplicable, OperatorKind, SuppressionConfig,
};
use crate::project::Project;

/// Lines per file.
pub type LineSet = BTreeMap<String, BTreeSet<u32>>;

#[derive(Clone, Debug)]
pub struct BugCase {
    pub id: String,
    pub buggy: Project,
    pub fixed: Project,
    pub fix_diff: ChangeSet,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingMode {
    #[default]
    Strict,
    Relaxed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingConfig {
    pub step_budget: u64,
    pub suppression: SuppressionConfig,
}

impl Default for CouplingConfig {
    fn default() -> Self {
        CouplingConfig {
            step_budget: DEFAULT_STEP_BUDGET,
            suppression: SuppressionConfig::default(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CouplingError {
    #[error("bug {0}: no test of the fixed suite fails on the buggy code")]
    NoTriggeringTest(String),
    #[error("bug {bug}: fixed tests fail on the fixed code: {}", failing.join(", "))]
    FixedSuiteFailure { bug: String, failing: Vec<String> },
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Fixed-suite tests that fail when run against the buggy program.
pub fn triggering_tests(bug: &BugCase, step_budget: u64) -> Result<BTreeSet<String>, CouplingError> {
    let fixed_outcomes = bug.fixed.run_tests(step_budget)?;
    let failing: Vec<String> = fixed_outcomes
        .iter()
        .filter(|o| o.verdict.is_failure())
        .map(|o| o.test_name.clone())
        .collect();
    if !failing.is_empty() {
        return Err(CouplingError::FixedSuiteFailure {
            bug: bug.id.clone(),
            failing,
        });
    }
    let on_buggy = bug.buggy.suite_against(&bug.fixed.tests)?.run_all(step_budget);
    let triggering: BTreeSet<String> = on_buggy
        .into_iter()
        .filter(|o| o.verdict.is_failure())
        .map(|o| o.test_name)
        .collect();
    if triggering.is_empty() {
        return Err(CouplingError::NoTriggeringTest(bug.id.clone()));
    }
    Ok(triggering)
}

/// Lines inside the fix's hunk windows, per version, for program files only.
pub fn affected_lines(bug: &BugCase) -> (LineSet, LineSet) {
    let mut buggy = LineSet::new();
    let mut fixed = LineSet::new();
    for f in &bug.fix_diff.files {
        if let Some(p) = f.old_path.as_deref().filter(|p| !is_test_path(p)) {
            let lines = f.old_window_lines();
            if !lines.is_empty() {
                buggy.entry(String::from(p)).or_default().extend(lines);
            }
        }
        if let Some(p) = f.new_path.as_deref().filter(|p| !is_test_path(p)) {
            let lines = f.new_window_lines();
            if !lines.is_empty() {
                fixed.entry(String::from(p)).or_default().extend(lines);
            }
        }
    }
    (buggy, fixed)
}

/// Pairs mutants that exist in both versions: same file, aligned lines,
/// same operator and variant, byte-equal snippets. When a line has several
/// identical candidates they pair up in column order, so the matching is
/// injective both ways. Returns index pairs into the two slices.
pub fn match_mutants(buggy: &[Mutant], fixed: &[Mutant], alignment: &ChangeSet) -> Vec<(usize, usize)> {
    let mut used = BTreeSet::new();
    let mut pairs = Vec::new();
    for (bi, mb) in buggy.iter().enumerate() {
        let Some(file) = alignment.file_by_old_path(&mb.point.path) else {
            continue;
        };
        let Some(new_line) = file.old_to_new(mb.line()) else {
            continue;
        };
        let Some(new_path) = file.new_path.as_deref() else {
            continue;
        };
        let hit = fixed.iter().enumerate().find(|(fi, mf)| {
            !used.contains(fi)
                && mf.point.path == new_path
                && mf.line() == new_line
                && mf.operator == mb.operator
                && mf.variant == mb.variant
                && mf.point.original_snippet == mb.point.original_snippet
                && mf.replacement_snippet == mb.replacement_snippet
        });
        if let Some((fi, _)) = hit {
            used.insert(fi);
            pairs.push((bi, fi));
        }
    }
    pairs
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Version {
    Buggy,
    Fixed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutantCoupling {
    pub buggy_id: Option<String>,
    pub fixed_id: Option<String>,
    pub file: String,
    pub buggy_line: Option<u32>,
    pub fixed_line: Option<u32>,
    pub operator: OperatorKind,
    pub variant: usize,
    pub original_snippet: String,
    pub replacement_snippet: String,
    pub exists_in_both: bool,
    pub live_in_buggy: bool,
    pub killed_in_fixed: bool,
    pub killing_tests: Vec<String>,
    pub coupled_strict: bool,
    pub coupled_relaxed: bool,
}

/// A point/operator pair that produced no mutant, kept as raw material for
/// classifying uncoupled bugs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionRecord {
    pub version: Version,
    pub file: String,
    pub line: u32,
    pub snippet: String,
    pub operator: Option<OperatorKind>,
    pub reason: NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingResult {
    pub bug_id: String,
    pub mode: CouplingMode,
    pub triggering_tests: Vec<String>,
    pub buggy_lines: LineSet,
    pub fixed_lines: LineSet,
    pub mutants: Vec<MutantCoupling>,
    pub matched: usize,
    pub coupled_strict: usize,
    pub coupled_relaxed: usize,
    pub bug_coupled: bool,
    pub rejections: Vec<RejectionRecord>,
}

fn enumerate_version(
    project: &Project,
    lines: &LineSet,
    version: Version,
    cfg: &SuppressionConfig,
    rejections: &mut Vec<RejectionRecord>,
) -> Vec<Mutant> {
    let mut out = Vec::new();
    for (path, set) in lines {
        let Some(module) = project.source(path) else {
            continue;
        };
        let (mutants, rejected) = enumerate_with_rejections(module, set, cfg).expect("non-empty line set");
        out.extend(mutants);
        rejections.extend(rejected.into_iter().map(|r| RejectionRecord {
            version,
            file: r.point.path.clone(),
            line: r.point.line,
            snippet: r.point.original_snippet.clone(),
            operator: r.operator,
            reason: r.reason,
        }));
    }
    out
}

/// Runs the coupling pipeline for one bug. Mutant runs never exit early, so
/// every killing test is known.
pub fn coupling_analysis<E: Executor>(
    bug: &BugCase,
    mode: CouplingMode,
    cfg: &CouplingConfig,
    exec: &E,
) -> Result<CouplingResult, CouplingError> {
    let triggering = triggering_tests(bug, cfg.step_budget)?;
    let (buggy_lines, fixed_lines) = affected_lines(bug);
    let mut rejections = Vec::new();
    let buggy_mutants = enumerate_version(
        &bug.buggy,
        &buggy_lines,
        Version::Buggy,
        &cfg.suppression,
        &mut rejections,
    );
    let fixed_mutants = enumerate_version(
        &bug.fixed,
        &fixed_lines,
        Version::Fixed,
        &cfg.suppression,
        &mut rejections,
    );
    let pairs = match_mutants(&buggy_mutants, &fixed_mutants, &bug.fix_diff);

    let buggy_passing = bug.buggy.passing_tests(cfg.step_budget)?;
    let fixed_passing = bug.fixed.passing_tests(cfg.step_budget)?;
    let results = exec.map(&pairs, |&(bi, fi)| {
        let b = evaluate_mutant(&bug.buggy, &buggy_mutants[bi], &buggy_passing, cfg.step_budget, false)?;
        let f = evaluate_mutant(&bug.fixed, &fixed_mutants[fi], &fixed_passing, cfg.step_budget, false)?;
        Ok::<_, EvalError>((b, f))
    });

    let mut records = Vec::new();
    let mut matched_b = BTreeSet::new();
    let mut matched_f = BTreeSet::new();
    for (&(bi, fi), result) in pairs.iter().zip(results) {
        let (b, f) = result?;
        matched_b.insert(bi);
        matched_f.insert(fi);
        let (mb, mf) = (&buggy_mutants[bi], &fixed_mutants[fi]);
        let live_in_buggy = b.status == MutantStatus::Live;
        let killed_in_fixed = f.status == MutantStatus::Killed;
        let coupled_relaxed = live_in_buggy && killed_in_fixed;
        let only_triggering =
            !f.killing_tests.is_empty() && f.killing_tests.iter().all(|t| triggering.contains(t));
        records.push(MutantCoupling {
            buggy_id: Some(mb.id.clone()),
            fixed_id: Some(mf.id.clone()),
            file: mf.point.path.clone(),
            buggy_line: Some(mb.line()),
            fixed_line: Some(mf.line()),
            operator: mf.operator,
            variant: mf.variant,
            original_snippet: mf.point.original_snippet.clone(),
            replacement_snippet: mf.replacement_snippet.clone(),
            exists_in_both: true,
            live_in_buggy,
            killed_in_fixed,
            killing_tests: f.killing_tests,
            coupled_strict: coupled_relaxed && only_triggering,
            coupled_relaxed,
        });
    }
    let unmatched = |m: &Mutant, version: Version| MutantCoupling {
        buggy_id: (version == Version::Buggy).then(|| m.id.clone()),
        fixed_id: (version == Version::Fixed).then(|| m.id.clone()),
        file: m.point.path.clone(),
        buggy_line: (version == Version::Buggy).then(|| m.line()),
        fixed_line: (version == Version::Fixed).then(|| m.line()),
        operator: m.operator,
        variant: m.variant,
        original_snippet: m.point.original_snippet.clone(),
        replacement_snippet: m.replacement_snippet.clone(),
        exists_in_both: false,
        live_in_buggy: false,
        killed_in_fixed: false,
        killing_tests: Vec::new(),
        coupled_strict: false,
        coupled_relaxed: false,
    };
    for (i, m) in buggy_mutants.iter().enumerate() {
        if !matched_b.contains(&i) {
            records.push(unmatched(m, Version::Buggy));
        }
    }
    for (i, m) in fixed_mutants.iter().enumerate() {
        if !matched_f.contains(&i) {
            records.push(unmatched(m, Version::Fixed));
        }
    }

    let coupled_strict = records.iter().filter(|r| r.coupled_strict).count();
    let coupled_relaxed = records.iter().filter(|r| r.coupled_relaxed).count();
    let bug_coupled = match mode {
        CouplingMode::Strict => coupled_strict > 0,
        CouplingMode::Relaxed => coupled_relaxed > 0,
    };
    Ok(CouplingResult {
        bug_id: bug.id.clone(),
        mode,
        triggering_tests: triggering.into_iter().collect(),
        buggy_lines,
        fixed_lines,
        matched: pairs.len(),
        mutants: records,
        coupled_strict,
        coupled_relaxed,
        bug_coupled,
        rejections,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cell {
    KilledBy,
    NotKilledBy,
    NotRun,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixRow {
    pub mutant_id: String,
    pub file: String,
    pub line: u32,
    pub operator: OperatorKind,
    pub cells: Vec<Cell>,
}

impl MatrixRow {
    pub fn is_live(&self) -> bool {
        !self.cells.contains(&Cell::KilledBy)
    }
}

/// Outcome of every test against every mutant, computed without early exit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KillMatrix {
    /// Distinguishes matrices from different versions of a project.
    pub label: String,
    pub tests: Vec<String>,
    pub rows: Vec<MatrixRow>,
}

pub fn build_kill_matrix<E: Executor>(
    label: &str,
    project: &Project,
    mutants: &[Mutant],
    step_budget: u64,
    exec: &E,
) -> Result<KillMatrix, EvalError> {
    let tests: Vec<String> = project
        .suite()?
        .test_names()
        .iter()
        .map(|t| String::from(*t))
        .collect();
    let passing = project.passing_tests(step_budget)?;
    let evals = exec.map(mutants, |m| evaluate_mutant(project, m, &passing, step_budget, false));
    let mut rows = Vec::with_capacity(mutants.len());
    for (m, e) in mutants.iter().zip(evals) {
        let e = e?;
        let cells = tests
            .iter()
            .map(|t| {
                if e.killing_tests.contains(t) {
                    Cell::KilledBy
                } else if e.tests_run.contains(t) {
                    Cell::NotKilledBy
                } else {
                    Cell::NotRun
                }
            })
            .collect();
        rows.push(MatrixRow {
            mutant_id: m.id.clone(),
            file: m.point.path.clone(),
            line: m.line(),
            operator: m.operator,
            cells,
        });
    }
    Ok(KillMatrix {
        label: String::from(label),
        tests,
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFate {
    pub label: String,
    pub file: String,
    pub line: u32,
    pub total: usize,
    pub killed: usize,
    /// Size of the larger of the killed and live groups.
    pub majority: usize,
    pub majority_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MajorityFateStats {
    pub lines: Vec<LineFate>,
    /// Bins [0.5,0.6), ..., [0.9,1.0), then exactly 1.0.
    pub histogram: Vec<HistogramBin>,
    pub fraction_at_100: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("no lines with >= 2 mutants")]
pub struct NoEligibleLines;

/// Per-line majority fate over lines with at least two mutants.
pub fn majority_fate(matrices: &[KillMatrix]) -> Result<MajorityFateStats, NoEligibleLines> {
    let mut groups: BTreeMap<(&str, &str, u32), (usize, usize)> = BTreeMap::new();
    for m in matrices {
        for row in &m.rows {
            let g = groups.entry((&m.label, &row.file, row.line)).or_default();
            g.0 += 1;
            if !row.is_live() {
                g.1 += 1;
            }
        }
    }
    let lines: Vec<LineFate> = groups
        .into_iter()
        .filter(|(_, (total, _))| *total >= 2)
        .map(|((label, file, line), (total, killed))| {
            let majority = killed.max(total - killed);
            LineFate {
                label: String::from(label),
                file: String::from(file),
                line,
                total,
                killed,
                majority,
                majority_ratio: majority as f64 / total as f64,
            }
        })
        .collect();
    if lines.is_empty() {
        return Err(NoEligibleLines);
    }
    let mut histogram: Vec<HistogramBin> = (5..10)
        .map(|i| HistogramBin {
            lower: i as f64 / 10.0,
            upper: (i + 1) as f64 / 10.0,
            count: 0,
        })
        .collect();
    histogram.push(HistogramBin {
        lower: 1.0,
        upper: 1.0,
        count: 0,
    });
    for l in &lines {
        let idx = if l.majority == l.total {
            5
        } else {
            // majority / total in [0.5, 1): bin by tenths with exact integer arithmetic
            ((l.majority * 10) / l.total).clamp(5, 9) - 5
        };
        histogram[idx].count += 1;
    }
    let full = lines.iter().filter(|l| l.majority == l.total).count();
    let fraction_at_100 = full as f64 / lines.len() as f64;
    Ok(MajorityFateStats {
        lines,
        histogram,
        fraction_at_100,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn matrix(rows: &[(u32, bool)]) -> KillMatrix {
        KillMatrix {
            label: "p".into(),
            tests: vec!["t".into()],
            rows: rows
                .iter()
                .enumerate()
                .map(|(i, &(line, killed))| MatrixRow {
                    mutant_id: alloc::format!("m{i}"),
                    file: "f".into(),
                    line,
                    operator: OperatorKind::Aor,
                    cells: vec![if killed { Cell::KilledBy } else { Cell::NotKilledBy }],
                })
                .collect(),
        }
    }

    #[test]
    fn two_of_three() {
        let s = majority_fate(&[matrix(&[(1, true), (1, true), (1, false)])]).unwrap();
        assert_eq!(s.lines.len(), 1);
        assert_eq!(s.lines[0].majority, 2);
        assert!((s.lines[0].majority_ratio - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.histogram[1].count, 1);
        assert_eq!(s.fraction_at_100, 0.0);
    }

    #[test]
    fn unanimous_lines() {
        let s = majority_fate(&[matrix(&[(1, true), (1, true), (2, false), (2, false), (3, true)])]).unwrap();
        assert_eq!(s.lines.len(), 2);
        assert!(s.lines.iter().all(|l| l.majority_ratio == 1.0));
        assert_eq!(s.fraction_at_100, 1.0);
        assert_eq!(s.histogram[5].count, 2);
    }

    #[test]
    fn no_multi_mutant_lines() {
        assert_eq!(majority_fate(&[matrix(&[(1, true), (2, false)])]), Err(NoEligibleLines));
    }

    #[test]
    fn half_split_is_half() {
        let s = majority_fate(&[matrix(&[(1, true), (1, false)])]).unwrap();
        assert_eq!(s.lines[0].majority_ratio, 0.5);
        assert_eq!(s.histogram[0].count, 1);
    }
}
