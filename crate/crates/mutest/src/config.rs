//! Run configuration: defaults, overridden by a TOML file, overridden by
//! command-line flags.
//!
//! ```toml
//! step_budget = 100000
//! jobs = 4
//! suppress = ["log", "print", "debug*", "trace*"]
//! suppress_uncovered = true
//! mode = "strict"
//! max_findings_per_file = 7
//! [weights]
//! survival = 0.5
//! productivity = 0.5
//! ```

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use mutest_core::change::{ChangeConfig, MAX_FINDINGS_PER_FILE};
use mutest_core::coupling::{CouplingConfig, CouplingMode};
use mutest_core::lang::DEFAULT_STEP_BUDGET;
use mutest_core::mutagen::SuppressionConfig;
use mutest_core::selection::ScoreWeights;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub step_budget: Option<u64>,
    pub jobs: Option<usize>,
    pub suppress: Option<Vec<String>>,
    pub suppress_uncovered: Option<bool>,
    pub mode: Option<CouplingMode>,
    pub max_findings_per_file: Option<usize>,
    pub weights: Option<ScoreWeights>,
    pub stats: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub step_budget: u64,
    pub jobs: usize,
    pub suppression: SuppressionConfig,
    pub mode: CouplingMode,
    pub weights: ScoreWeights,
    pub max_findings_per_file: usize,
    pub stats: Option<PathBuf>,
}

impl RunConfig {
    pub fn defaults(jobs: usize) -> Self {
        RunConfig {
            step_budget: DEFAULT_STEP_BUDGET,
            jobs,
            suppression: SuppressionConfig::default(),
            mode: CouplingMode::Strict,
            weights: ScoreWeights::default(),
            max_findings_per_file: MAX_FINDINGS_PER_FILE,
            stats: None,
        }
    }

    pub fn apply_file(&mut self, f: FileConfig) {
        if let Some(v) = f.step_budget {
            self.step_budget = v;
        }
        if let Some(v) = f.jobs {
            self.jobs = v;
        }
        if let Some(v) = f.suppress {
            self.suppression.callee_denylist = v;
        }
        if let Some(v) = f.suppress_uncovered {
            self.suppression.suppress_uncovered = v;
        }
        if let Some(v) = f.mode {
            self.mode = v;
        }
        if let Some(v) = f.max_findings_per_file {
            self.max_findings_per_file = v;
        }
        if let Some(v) = f.weights {
            self.weights = v;
        }
        if let Some(v) = f.stats {
            self.stats = Some(v);
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.step_budget < 1 {
            bail!("step budget must be at least 1");
        }
        if self.jobs < 1 {
            bail!("jobs must be at least 1");
        }
        Ok(())
    }

    pub fn change_config(&self) -> ChangeConfig {
        ChangeConfig {
            suppression: self.suppression.clone(),
            step_budget: self.step_budget,
            weights: self.weights,
            max_findings_per_file: self.max_findings_per_file,
        }
    }

    pub fn coupling_config(&self) -> CouplingConfig {
        CouplingConfig {
            step_budget: self.step_budget,
            suppression: self.suppression.clone(),
        }
    }
}
