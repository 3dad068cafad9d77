//! Measurements over a history of analyzed changes: test hunks, exposure,
//! survivability and Spearman rank correlation.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::diff::ChangeSet;

/// Default test-file classifier: a `tests/` path segment, or a file name
/// ending in `_test.mini`.
pub fn is_test_path(path: &str) -> bool {
    path.starts_with("tests/") || path.contains("/tests/") || path.ends_with("_test.mini")
}

/// Number of maximal runs of added lines in test files. Runs are taken over
/// new-side line numbers, so a removed line inside an edit does not split it
/// while any context line does.
pub fn count_test_hunks(diff: &ChangeSet, is_test: impl Fn(&str) -> bool) -> usize {
    let mut count = 0;
    for f in &diff.files {
        let Some(path) = f.new_path.as_deref() else {
            continue;
        };
        if !is_test(path) {
            continue;
        }
        let mut prev: Option<u32> = None;
        for line in f.added_lines() {
            if prev.map_or(true, |p| p + 1 != line) {
                count += 1;
            }
            prev = Some(line);
        }
    }
    count
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileStat {
    pub path: String,
    pub had_findings: bool,
    pub findings_count: usize,
    pub generated: usize,
    pub survived: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeRecord {
    pub change_id: String,
    /// Ordering key; records are processed in ascending order.
    pub order: u64,
    pub files: Vec<FileStat>,
    pub diff: ChangeSet,
}

impl ChangeRecord {
    pub fn file(&self, path: &str) -> Option<&FileStat> {
        self.files.iter().find(|f| f.path == path)
    }

    pub fn is_consistent(&self) -> bool {
        self.files.iter().all(|f| f.survived <= f.generated)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("unknown change {0}")]
    UnknownChange(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("change {0}: survived exceeds generated")]
    Inconsistent(String),
}

/// Number of records strictly before `upto` whose file had findings.
/// `history` is one file's records in order.
pub fn exposure(history: &[&ChangeRecord], file: &str, upto: &str) -> Result<usize, MetricsError> {
    let pos = history
        .iter()
        .position(|r| r.change_id == upto)
        .ok_or_else(|| MetricsError::UnknownChange(String::from(upto)))?;
    Ok(history[..pos]
        .iter()
        .filter(|r| r.file(file).is_some_and(|f| f.had_findings))
        .count())
}

/// Surviving over generated mutants; `None` when nothing was generated.
pub fn survivability(record: &ChangeRecord, file: &str) -> Option<f64> {
    let f = record.file(file)?;
    (f.generated > 0).then(|| f.survived as f64 / f.generated as f64)
}

/// Ranks starting at 1; tied values share the mean of the ranks they span.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = alloc::vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        // positions i..=j hold rank values i+1..=j+1
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    (sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0)
}

/// Spearman's rank correlation coefficient with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64, MetricsError> {
    if xs.len() != ys.len() {
        return Err(MetricsError::DegenerateInput("length mismatch"));
    }
    if xs.len() < 2 {
        return Err(MetricsError::DegenerateInput("fewer than two observations"));
    }
    if xs.iter().any(|v| v.is_nan()) || ys.iter().any(|v| v.is_nan()) {
        return Err(MetricsError::DegenerateInput("NaN value"));
    }
    if xs.iter().all(|&x| x == xs[0]) || ys.iter().all(|&y| y == ys[0]) {
        return Err(MetricsError::DegenerateInput("constant series"));
    }
    Ok(pearson(&average_ranks(xs), &average_ranks(ys)))
}

/// How per-change test hunks are normalized by file count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Divide by every file touched in the diff.
    AllDiffFiles,
    /// Divide by the files analyzed in the change record.
    RecordFiles,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub change_id: String,
    pub exposure: usize,
    pub test_hunks: usize,
    pub hunks_per_diff_file: f64,
    pub hunks_per_record_file: f64,
    pub survivability: Option<f64>,
}

/// One file's history in change order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExposureSeries {
    pub file: String,
    pub points: Vec<SeriesPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub label: String,
    /// Number of distinct exposure levels correlated.
    pub levels: usize,
    /// `None` when the input is degenerate.
    pub r_s: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub changes: usize,
    pub series: Vec<ExposureSeries>,
    pub correlations: Vec<Correlation>,
}

/// Per-exposure-level averages of an observable, in ascending exposure.
fn level_means(points: impl Iterator<Item = (usize, f64)>) -> (Vec<f64>, Vec<f64>) {
    let mut acc: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for (e, v) in points {
        let a = acc.entry(e).or_default();
        a.0 += v;
        a.1 += 1;
    }
    acc.into_iter()
        .map(|(e, (sum, n))| (e as f64, sum / n as f64))
        .unzip()
}

fn correlate(label: &str, xs: Vec<f64>, ys: Vec<f64>) -> Correlation {
    Correlation {
        label: String::from(label),
        levels: xs.len(),
        r_s: spearman(&xs, &ys).ok(),
    }
}

/// Builds each file's exposure series and correlates exposure level with the
/// mean normalized test hunks (both normalizations) and mean survivability.
pub fn analyze_history(
    records: &[ChangeRecord],
    is_test: impl Fn(&str) -> bool,
) -> Result<MetricsReport, MetricsError> {
    if records.len() < 2 {
        return Err(MetricsError::DegenerateInput("history needs at least two changes"));
    }
    let mut ordered: Vec<&ChangeRecord> = records.iter().collect();
    ordered.sort_by(|a, b| a.order.cmp(&b.order).then_with(|| a.change_id.cmp(&b.change_id)));
    for r in &ordered {
        if !r.is_consistent() {
            return Err(MetricsError::Inconsistent(r.change_id.clone()));
        }
    }
    let mut by_file: BTreeMap<&str, Vec<&ChangeRecord>> = BTreeMap::new();
    for r in &ordered {
        for f in &r.files {
            by_file.entry(f.path.as_str()).or_default().push(r);
        }
    }
    let mut series = Vec::new();
    for (file, history) in &by_file {
        let mut points = Vec::with_capacity(history.len());
        let mut exposure = 0;
        for r in history {
            let hunks = count_test_hunks(&r.diff, &is_test);
            let diff_files = r.diff.files.len().max(1) as f64;
            let record_files = r.files.len().max(1) as f64;
            points.push(SeriesPoint {
                change_id: r.change_id.clone(),
                exposure,
                test_hunks: hunks,
                hunks_per_diff_file: hunks as f64 / diff_files,
                hunks_per_record_file: hunks as f64 / record_files,
                survivability: survivability(r, file),
            });
            if r.file(file).is_some_and(|f| f.had_findings) {
                exposure += 1;
            }
        }
        series.push(ExposureSeries {
            file: String::from(*file),
            points,
        });
    }
    let all = || series.iter().flat_map(|s| s.points.iter());
    let (x1, y1) = level_means(all().map(|p| (p.exposure, p.hunks_per_diff_file)));
    let (x2, y2) = level_means(all().map(|p| (p.exposure, p.hunks_per_record_file)));
    let (x3, y3) = level_means(all().filter_map(|p| p.survivability.map(|s| (p.exposure, s))));
    let correlations = alloc::vec![
        correlate("exposure_vs_test_hunks_per_diff_file", x1, y1),
        correlate("exposure_vs_test_hunks_per_record_file", x2, y2),
        correlate("exposure_vs_survivability", x3, y3),
    ];
    Ok(MetricsReport {
        changes: ordered.len(),
        series,
        correlations,
    })
}
