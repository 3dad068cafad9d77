//! History directories: one JSON record per analyzed change.
//!
//! ```json
//! {
//!   "change_id": "c001",
//!   "order": 1,
//!   "files": [{"path": "src/a.mini", "had_findings": true,
//!              "findings_count": 1, "generated": 4, "survived": 1}],
//!   "diff": "--- a/src/a.mini\n+++ b/src/a.mini\n..."
//! }
//! ```

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use mutest_core::diff::parse_unified_diff;
use mutest_core::metrics::{ChangeRecord, FileStat};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistoryRecord {
    pub change_id: String,
    pub order: u64,
    pub files: Vec<FileStat>,
    /// Raw unified diff of the change.
    pub diff: String,
}

impl HistoryRecord {
    pub fn to_record(&self) -> Result<ChangeRecord> {
        let diff = parse_unified_diff(&self.diff)?;
        let record = ChangeRecord {
            change_id: self.change_id.clone(),
            order: self.order,
            files: self.files.clone(),
            diff,
        };
        if !record.is_consistent() {
            bail!("survived exceeds generated");
        }
        Ok(record)
    }
}

/// Reads every `*.json` file in `dir` (sorted by name). Malformed records
/// are errors naming the file.
pub fn load_history(dir: &Path) -> Result<Vec<ChangeRecord>> {
    let mut paths: Vec<_> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!("{}: no change records", dir.display());
    }
    paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let rec: HistoryRecord =
                serde_json::from_str(&text).with_context(|| format!("malformed record {}", p.display()))?;
            rec.to_record().with_context(|| format!("malformed record {}", p.display()))
        })
        .collect()
}
