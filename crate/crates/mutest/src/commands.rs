//! The subcommands as library functions. Each writes its report atomically
//! and returns it together with a [`Status`] that maps to the exit code.

use std::fs::{self, OpenOptions};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use mutest_core::change::{analyze_change, apply_feedback, CoverageMap, FindingsReport};
use mutest_core::coupling::{
    build_kill_matrix, coupling_analysis, majority_fate, BugCase, CouplingMode, CouplingResult, KillMatrix,
    MajorityFateStats,
};
use mutest_core::lang::TestOutcome;
use mutest_core::metrics::{analyze_history, is_test_path, MetricsReport};
use mutest_core::mutagen::enumerate_all_mutants;
use mutest_core::project::Project;
use mutest_core::selection::{FeedbackVerdict, OperatorStats};

use crate::config::RunConfig;
use crate::formats::{coverage_csv, read_coverage, read_json, read_stats, write_atomic, write_json, write_stats};
use crate::history::load_history;
use crate::load::{load_bug, load_diff, load_project, read_text, subdirs};
use crate::pool::Pool;

/// Non-error result of a command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// Exit 0: nothing to report (no findings, bug coupled, all tests pass).
    Clean,
    /// Exit 1: live findings, an uncoupled bug, or failing tests.
    Flagged,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Clean => 0,
            Status::Flagged => 1,
        }
    }
}

/// Exclusive lock on the stats store for the duration of a run.
pub struct StatsLock {
    path: PathBuf,
}

impl StatsLock {
    pub fn acquire(stats: &Path) -> Result<Self> {
        let mut name = stats.as_os_str().to_owned();
        name.push(".lock");
        let path = PathBuf::from(name);
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&path)
            .with_context(|| format!("stats store is locked ({} exists)", path.display()))?;
        Ok(StatsLock { path })
    }
}

impl Drop for StatsLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

pub struct ChangeInputs<'a> {
    pub base: &'a Path,
    pub head: &'a Path,
    pub diff: &'a Path,
    pub coverage: &'a Path,
    pub change_id: Option<&'a str>,
}

fn digest16(text: &str) -> String {
    let d = Sha256::digest(text.as_bytes());
    d[..8].iter().map(|b| format!("{b:02x}")).collect()
}

pub fn cmd_change(inputs: &ChangeInputs, cfg: &RunConfig, out: &Path) -> Result<(FindingsReport, Status)> {
    let base = load_project(inputs.base)?;
    let head = load_project(inputs.head)?;
    let diff_text = read_text(inputs.diff)?;
    let diff = load_diff(inputs.diff)?;
    let cov = read_coverage(inputs.coverage)?;
    let change_id = inputs
        .change_id
        .map(String::from)
        .unwrap_or_else(|| digest16(&diff_text));
    let _lock = cfg.stats.as_deref().map(StatsLock::acquire).transpose()?;
    let stats = match &cfg.stats {
        Some(p) => read_stats(p)?,
        None => OperatorStats::new(),
    };
    let pool = Pool::new(cfg.jobs)?;
    let change_cfg = cfg.change_config();
    let (report, next) = pool.install(|| {
        analyze_change(&change_id, &base, &head, &diff, &cov, &stats, &change_cfg, &pool)
    })?;
    write_json(out, &report)?;
    if let Some(p) = &cfg.stats {
        write_stats(p, &next)?;
    }
    let status = if report.summary.surfaced > 0 {
        Status::Flagged
    } else {
        Status::Clean
    };
    Ok((report, status))
}

pub fn cmd_feedback(report: &Path, mutant_id: &str, verdict: FeedbackVerdict, cfg: &RunConfig) -> Result<OperatorStats> {
    let stats_path = cfg
        .stats
        .as_deref()
        .ok_or_else(|| anyhow!("feedback needs a stats store (--stats)"))?;
    let report: FindingsReport = read_json(report)?;
    let _lock = StatsLock::acquire(stats_path)?;
    let stats = read_stats(stats_path)?;
    let next = apply_feedback(&report, mutant_id, verdict, &stats)?;
    write_stats(stats_path, &next)?;
    Ok(next)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingReport {
    pub mode: CouplingMode,
    pub total_bugs: usize,
    pub coupled_bugs: usize,
    pub coupled: Vec<String>,
    pub not_coupled: Vec<String>,
    pub bugs: Vec<CouplingResult>,
}

/// Bug directories named directly, plus every subdirectory of each corpus.
pub fn bug_dirs(bugs: &[PathBuf], corpora: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut dirs = bugs.to_vec();
    for c in corpora {
        dirs.extend(subdirs(c)?);
    }
    if dirs.is_empty() {
        bail!("no bug directories given");
    }
    Ok(dirs)
}

pub fn cmd_coupling(dirs: &[PathBuf], cfg: &RunConfig, out: &Path) -> Result<(CouplingReport, Status)> {
    let bugs: Vec<BugCase> = dirs.iter().map(|d| load_bug(d)).collect::<Result<_, _>>()?;
    let pool = Pool::new(cfg.jobs)?;
    let ccfg = cfg.coupling_config();
    let mut results = Vec::with_capacity(bugs.len());
    for bug in &bugs {
        let r = pool
            .install(|| coupling_analysis(bug, cfg.mode, &ccfg, &pool))
            .with_context(|| format!("bug {}", bug.id))?;
        results.push(r);
    }
    let (coupled, not_coupled): (Vec<&CouplingResult>, Vec<&CouplingResult>) =
        results.iter().partition(|r| r.bug_coupled);
    let report = CouplingReport {
        mode: cfg.mode,
        total_bugs: results.len(),
        coupled_bugs: coupled.len(),
        coupled: coupled.iter().map(|r| r.bug_id.clone()).collect(),
        not_coupled: not_coupled.iter().map(|r| r.bug_id.clone()).collect(),
        bugs: results.clone(),
    };
    write_json(out, &report)?;
    let status = if report.not_coupled.is_empty() {
        Status::Clean
    } else {
        Status::Flagged
    };
    Ok((report, status))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RedundancyReport {
    pub matrices: Vec<KillMatrix>,
    pub majority_fate: MajorityFateStats,
}

/// Every mutant on the covered lines of `project`, with its full kill
/// matrix.
pub fn project_matrix(label: &str, project: &Project, cfg: &RunConfig, pool: &Pool) -> Result<KillMatrix> {
    let (_, cov) = project.run_tests_traced(cfg.step_budget)?;
    let mut mutants = Vec::new();
    for m in &project.sources {
        if let Some(lines) = cov.get(&m.path).filter(|l| !l.is_empty()) {
            mutants.extend(enumerate_all_mutants(m, lines, &cfg.suppression)?);
        }
    }
    Ok(build_kill_matrix(label, project, &mutants, cfg.step_budget, pool)?)
}

/// Redundancy over plain projects and over both versions of bug cases.
pub fn cmd_redundancy(projects: &[PathBuf], bugs: &[PathBuf], cfg: &RunConfig, out: &Path) -> Result<RedundancyReport> {
    let pool = Pool::new(cfg.jobs)?;
    let mut matrices = Vec::new();
    for dir in projects {
        let project = load_project(dir)?;
        let label = dir.to_string_lossy().into_owned();
        matrices.push(pool.install(|| project_matrix(&label, &project, cfg, &pool))?);
    }
    for dir in bugs {
        let bug = load_bug(dir)?;
        for (version, project) in [("buggy", &bug.buggy), ("fixed", &bug.fixed)] {
            let label = format!("{}/{version}", bug.id);
            matrices.push(pool.install(|| project_matrix(&label, project, cfg, &pool))?);
        }
    }
    if matrices.is_empty() {
        bail!("no projects or bugs given");
    }
    let majority_fate = majority_fate(&matrices)?;
    let report = RedundancyReport {
        matrices,
        majority_fate,
    };
    write_json(out, &report)?;
    Ok(report)
}

pub fn cmd_metrics(history: &Path, out: &Path) -> Result<MetricsReport> {
    let records = load_history(history)?;
    let report = analyze_history(&records, is_test_path)?;
    write_json(out, &report)?;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunTestsReport {
    pub passed: usize,
    pub failed: usize,
    pub outcomes: Vec<TestOutcome>,
}

pub fn cmd_run_tests(project: &Path, coverage_out: Option<&Path>, cfg: &RunConfig, out: &Path) -> Result<(RunTestsReport, Status)> {
    let project = load_project(project)?;
    let pool = Pool::new(1)?;
    let (outcomes, cov) = pool.install(|| project.run_tests_traced(cfg.step_budget))?;
    let failed = outcomes.iter().filter(|o| o.verdict.is_failure()).count();
    let report = RunTestsReport {
        passed: outcomes.len() - failed,
        failed,
        outcomes,
    };
    write_json(out, &report)?;
    if let Some(path) = coverage_out {
        let map = CoverageMap { files: cov };
        write_atomic(path, &coverage_csv(&map)?)?;
    }
    let status = if failed == 0 { Status::Clean } else { Status::Flagged };
    Ok((report, status))
}
