use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use mutest::commands::{cmd_change, project_matrix, ChangeInputs};
use mutest::config::RunConfig;
use mutest::load::{load_bug, load_project, subdirs};
use mutest::pool::Pool;
use mutest_core::coupling::{coupling_analysis, majority_fate, BugCase, Cell, CouplingError, CouplingMode};
use mutest_core::exec::Sequential;
use mutest_core::mutagen::{MutantStatus, OperatorKind};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn cfg() -> RunConfig {
    RunConfig::defaults(1)
}

#[test]
fn clamp_is_not_coupled() {
    let bug = load_bug(&fixtures().join("coupling/clamp")).unwrap();
    let r = coupling_analysis(&bug, CouplingMode::Strict, &cfg().coupling_config(), &Sequential).unwrap();
    assert_eq!(r.triggering_tests, ["test_clamp_upper"]);
    assert!(!r.bug_coupled);
    let lower_if = r
        .mutants
        .iter()
        .find(|m| m.operator == OperatorKind::Sbr && m.original_snippet.starts_with("if (x < lo)"))
        .expect("SBR on the lower bound check");
    assert_eq!(lower_if.killing_tests, ["test_clamp_lower"]);
    assert!(!lower_if.coupled_strict && !lower_if.coupled_relaxed);
}

#[test]
fn swapped_versions_do_not_couple() {
    let ccfg = cfg().coupling_config();
    for dir in subdirs(&fixtures().join("coupling/corpus")).unwrap() {
        let bug = load_bug(&dir).unwrap();
        let swapped = BugCase {
            id: bug.id.clone(),
            buggy: bug.fixed.clone(),
            fixed: bug.buggy.clone(),
            fix_diff: bug.fix_diff.reversed(),
        };
        match coupling_analysis(&swapped, CouplingMode::Strict, &ccfg, &Sequential) {
            Err(CouplingError::NoTriggeringTest(_)) => {}
            Ok(r) => assert_eq!(r.coupled_strict, 0, "{}", bug.id),
            Err(e) => panic!("{}: {e}", bug.id),
        }
    }
}

#[test]
fn strict_coupling_implies_relaxed() {
    let ccfg = cfg().coupling_config();
    for dir in subdirs(&fixtures().join("coupling/corpus")).unwrap() {
        let bug = load_bug(&dir).unwrap();
        let r = coupling_analysis(&bug, CouplingMode::Relaxed, &ccfg, &Sequential).unwrap();
        assert!(r.coupled_strict <= r.coupled_relaxed);
        for m in &r.mutants {
            assert!(!m.coupled_strict || m.coupled_relaxed);
            assert!(!m.coupled_relaxed || m.exists_in_both);
            assert_eq!(m.killed_in_fixed, !m.killing_tests.is_empty());
        }
    }
}

#[test]
fn matrix_agrees_with_change_report() {
    let tmp = tempfile::tempdir().unwrap();
    let fx = fixtures().join("demo");
    let inputs = ChangeInputs {
        base: &fx.join("base"),
        head: &fx.join("head"),
        diff: &fx.join("change.diff"),
        coverage: &fx.join("coverage.csv"),
        change_id: None,
    };
    let (report, _) = cmd_change(&inputs, &cfg(), &tmp.path().join("f.json")).unwrap();
    let head = load_project(&fx.join("head")).unwrap();
    let pool = Pool::new(1).unwrap();
    let matrix = project_matrix("demo", &head, &cfg(), &pool).unwrap();
    let rows: BTreeMap<&str, _> = matrix.rows.iter().map(|r| (r.mutant_id.as_str(), r)).collect();
    for e in &report.evaluations {
        let row = rows[e.mutant_id.as_str()];
        assert_eq!(row.is_live(), e.status == MutantStatus::Live, "{}", e.mutant_id);
        // change review stops at the first killing test
        let first_killer = matrix
            .tests
            .iter()
            .zip(&row.cells)
            .find(|(_, c)| **c == Cell::KilledBy)
            .map(|(t, _)| t);
        assert_eq!(first_killer, e.killing_tests.first());
        assert!(e.killing_tests.len() <= 1);
    }
}

#[test]
fn majority_never_below_half() {
    let pool = Pool::new(1).unwrap();
    let mut matrices = Vec::new();
    for dir in ["demo/head", "cap/head", "redundancy/mixed", "redundancy/redundant"] {
        let project = load_project(&fixtures().join(dir)).unwrap();
        matrices.push(project_matrix(dir, &project, &cfg(), &pool).unwrap());
    }
    let stats = majority_fate(&matrices).unwrap();
    for l in &stats.lines {
        assert!(l.total >= 2);
        assert!(2 * l.majority >= l.total);
        assert!(l.majority_ratio >= 0.5 && l.majority_ratio <= 1.0);
    }
    let binned: usize = stats.histogram.iter().map(|b| b.count).sum();
    assert_eq!(binned, stats.lines.len());
}

#[test]
fn parallel_and_sequential_runs_agree() {
    let bug = load_bug(&fixtures().join("coupling/corpus/off_by_one")).unwrap();
    let ccfg = cfg().coupling_config();
    let seq = coupling_analysis(&bug, CouplingMode::Strict, &ccfg, &Sequential).unwrap();
    let pool = Pool::new(4).unwrap();
    let par = pool.install(|| coupling_analysis(&bug, CouplingMode::Strict, &ccfg, &pool)).unwrap();
    assert_eq!(seq, par);
}
