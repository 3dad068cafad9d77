//! Command-line interface. Exit codes: 0 clean, 1 findings / not coupled /
//! failing tests, 2 error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use mutest_core::coupling::CouplingMode;
use mutest_core::selection::FeedbackVerdict;

use crate::commands::{self, ChangeInputs, Status};
use crate::config::{FileConfig, RunConfig};
use crate::pool::default_jobs;

pub const JOBS_ENV: &str = "MUTEST_JOBS";

#[derive(Debug, Parser)]
#[command(name = "mutest", version, about = "Diff-aware mutation testing for MiniLang projects")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Interpreter steps per test before it times out.
    #[arg(long, global = true)]
    pub step_budget: Option<u64>,
    /// Worker threads (default: number of processors). MUTEST_JOBS overrides.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Operator statistics store (CSV), read and updated in place.
    #[arg(long, global = true)]
    pub stats: Option<PathBuf>,
    /// Report output path.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Extra callee pattern to suppress (`*` and `?` globs); repeatable.
    #[arg(long = "suppress", global = true, value_name = "PATTERN")]
    pub suppress: Vec<String>,
    /// Coupling definition.
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,
    /// Reserved; every command is deterministic.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// TOML configuration file; flags take precedence over it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Strict,
    Relaxed,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum VerdictArg {
    PleaseFix,
    NotUseful,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze a change and report live mutants on changed, covered lines.
    Change {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        head: PathBuf,
        #[arg(long)]
        diff: PathBuf,
        /// `file,line` CSV of covered head lines.
        #[arg(long)]
        coverage: PathBuf,
        /// Defaults to a digest of the diff.
        #[arg(long)]
        change_id: Option<String>,
    },
    /// Record reviewer feedback on a finding in the stats store.
    Feedback {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        mutant: String,
        #[arg(long, value_enum)]
        verdict: VerdictArg,
    },
    /// Check whether mutants are coupled to bugs.
    Coupling {
        /// A bug directory (`buggy/`, `fixed/`, `fix.diff`); repeatable.
        #[arg(long)]
        bug: Vec<PathBuf>,
        /// A directory of bug directories; repeatable.
        #[arg(long)]
        corpus: Vec<PathBuf>,
    },
    /// Per-line majority fate of mutants on covered lines.
    Redundancy {
        #[arg(long)]
        project: Vec<PathBuf>,
        #[arg(long)]
        bug: Vec<PathBuf>,
        #[arg(long)]
        corpus: Vec<PathBuf>,
    },
    /// Exposure series and rank correlations over a change history.
    Metrics {
        #[arg(long)]
        history: PathBuf,
    },
    /// Run a project's tests, optionally writing line coverage.
    RunTests {
        #[arg(long)]
        project: PathBuf,
        #[arg(long)]
        coverage_out: Option<PathBuf>,
    },
}

fn resolve_config(g: &GlobalArgs, jobs_env: Option<&str>) -> Result<RunConfig> {
    let mut cfg = RunConfig::defaults(default_jobs());
    if let Some(path) = &g.config {
        cfg.apply_file(FileConfig::load(path)?);
    }
    if let Some(v) = g.step_budget {
        cfg.step_budget = v;
    }
    if let Some(v) = g.jobs {
        cfg.jobs = v;
    }
    if let Some(v) = jobs_env.filter(|v| !v.is_empty()) {
        cfg.jobs = v
            .trim()
            .parse()
            .with_context(|| format!("{JOBS_ENV}={v} is not a thread count"))?;
    }
    if let Some(p) = &g.stats {
        cfg.stats = Some(p.clone());
    }
    cfg.suppression.callee_denylist.extend(g.suppress.iter().cloned());
    if let Some(m) = g.mode {
        cfg.mode = match m {
            ModeArg::Strict => CouplingMode::Strict,
            ModeArg::Relaxed => CouplingMode::Relaxed,
        };
    }
    cfg.validate()?;
    Ok(cfg)
}

fn out_or<'a>(g: &'a GlobalArgs, default: &'a str) -> &'a Path {
    g.out.as_deref().unwrap_or(Path::new(default))
}

fn execute(cli: &Cli, jobs_env: Option<&str>) -> Result<Status> {
    let g = &cli.global;
    let cfg = resolve_config(g, jobs_env)?;
    match &cli.command {
        Command::Change {
            base,
            head,
            diff,
            coverage,
            change_id,
        } => {
            let out = out_or(g, "findings.json");
            let inputs = ChangeInputs {
                base,
                head,
                diff,
                coverage,
                change_id: change_id.as_deref(),
            };
            let (report, status) = commands::cmd_change(&inputs, &cfg, out)?;
            let s = &report.summary;
            println!(
                "change {}: {} eligible lines, {} mutants ({} killed, {} live), {} findings -> {}",
                report.change_id,
                s.eligible_lines,
                s.generated,
                s.killed,
                s.live,
                s.surfaced,
                out.display()
            );
            Ok(status)
        }
        Command::Feedback {
            report,
            mutant,
            verdict,
        } => {
            let v = match verdict {
                VerdictArg::PleaseFix => FeedbackVerdict::PleaseFix,
                VerdictArg::NotUseful => FeedbackVerdict::NotUseful,
            };
            commands::cmd_feedback(report, mutant, v, &cfg)?;
            println!("recorded {v:?} for {mutant}");
            Ok(Status::Clean)
        }
        Command::Coupling { bug, corpus } => {
            let out = out_or(g, "coupling.json");
            let dirs = commands::bug_dirs(bug, corpus)?;
            let (report, status) = commands::cmd_coupling(&dirs, &cfg, out)?;
            for b in &report.bugs {
                println!(
                    "{}: {} (strict {}, relaxed {}, matched {})",
                    b.bug_id,
                    if b.bug_coupled { "coupled" } else { "not coupled" },
                    b.coupled_strict,
                    b.coupled_relaxed,
                    b.matched
                );
            }
            println!("{}/{} bugs coupled -> {}", report.coupled_bugs, report.total_bugs, out.display());
            Ok(status)
        }
        Command::Redundancy { project, bug, corpus } => {
            let out = out_or(g, "redundancy.json");
            let mut bugs = bug.clone();
            for c in corpus {
                bugs.extend(crate::load::subdirs(c)?);
            }
            let report = commands::cmd_redundancy(project, &bugs, &cfg, out)?;
            let mf = &report.majority_fate;
            println!(
                "{} lines with >= 2 mutants, {:.3} at 100% majority -> {}",
                mf.lines.len(),
                mf.fraction_at_100,
                out.display()
            );
            Ok(Status::Clean)
        }
        Command::Metrics { history } => {
            let out = out_or(g, "metrics.json");
            let report = commands::cmd_metrics(history, out)?;
            for c in &report.correlations {
                match c.r_s {
                    Some(r) => println!("{}: r_s = {r:.4} over {} levels", c.label, c.levels),
                    None => println!("{}: undefined", c.label),
                }
            }
            Ok(Status::Clean)
        }
        Command::RunTests { project, coverage_out } => {
            let out = out_or(g, "test-results.json");
            let (report, status) = commands::cmd_run_tests(project, coverage_out.as_deref(), &cfg, out)?;
            println!("{} passed, {} failed -> {}", report.passed, report.failed, out.display());
            Ok(status)
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, jobs_env: Option<&str>) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli, jobs_env) {
        Ok(status) => status.exit_code(),
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}
