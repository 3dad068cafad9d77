//! File formats: coverage and stats CSV, JSON reports, atomic writes.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use mutest_core::change::CoverageMap;
use mutest_core::mutagen::{NodeKind, OperatorKind};
use mutest_core::selection::{ContextKey, Counters, OperatorStats};

/// Writes `bytes` to a temporary file next to `path`, then renames it into
/// place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("temp file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .map_err(|e| e.error)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, to_json(value)?.as_bytes())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

#[derive(Debug, Serialize, Deserialize)]
struct CoverageRow {
    file: String,
    line: u32,
}

/// Reads a `file,line` CSV.
pub fn read_coverage(path: &Path) -> Result<CoverageMap> {
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["file", "line"] {
        bail!("{}: expected header `file,line`", path.display());
    }
    let mut cov = CoverageMap::default();
    for (i, row) in rdr.deserialize::<CoverageRow>().enumerate() {
        let row = row.with_context(|| format!("{}: record {}", path.display(), i + 1))?;
        cov.insert(&row.file, row.line);
    }
    Ok(cov)
}

pub fn coverage_csv(cov: &CoverageMap) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if cov.files.values().all(|l| l.is_empty()) {
        w.write_record(["file", "line"])?;
    }
    for (file, lines) in &cov.files {
        for line in lines {
            w.serialize(CoverageRow {
                file: file.clone(),
                line: *line,
            })?;
        }
    }
    Ok(w.into_inner()?)
}

#[derive(Debug, Serialize, Deserialize)]
struct StatsRow {
    operator: String,
    node_kind: String,
    generated: u64,
    survived: u64,
    killed: u64,
    please_fix: u64,
    not_useful: u64,
}

/// Reads the operator stats store. A missing file is an empty store.
pub fn read_stats(path: &Path) -> Result<OperatorStats> {
    let mut stats = OperatorStats::new();
    if !path.exists() {
        return Ok(stats);
    }
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    for (i, row) in rdr.deserialize::<StatsRow>().enumerate() {
        let row = row.with_context(|| format!("{}: record {}", path.display(), i + 1))?;
        let op = OperatorKind::from_name(&row.operator)
            .with_context(|| format!("{}: unknown operator {}", path.display(), row.operator))?;
        let kind = NodeKind::from_name(&row.node_kind)
            .with_context(|| format!("{}: unknown node kind {}", path.display(), row.node_kind))?;
        let counters = Counters {
            generated: row.generated,
            survived: row.survived,
            killed: row.killed,
            not_useful: row.not_useful,
            please_fix: row.please_fix,
        };
        stats
            .set(ContextKey::new(op, kind), counters)
            .with_context(|| format!("{}: record {}", path.display(), i + 1))?;
    }
    Ok(stats)
}

/// All 30 context rows, in operator then node-kind order.
pub fn stats_csv(stats: &OperatorStats) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for key in ContextKey::all() {
        let c = stats.get(key);
        w.serialize(StatsRow {
            operator: key.operator.name().into(),
            node_kind: key.node_kind.name().into(),
            generated: c.generated,
            survived: c.survived,
            killed: c.killed,
            please_fix: c.please_fix,
            not_useful: c.not_useful,
        })?;
    }
    Ok(w.into_inner()?)
}

pub fn write_stats(path: &Path, stats: &OperatorStats) -> Result<()> {
    write_atomic(path, &stats_csv(stats)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mutest_core::selection::OutcomeEvent;

    #[test]
    fn stats_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("stats.csv");
        let mut stats = OperatorStats::new();
        let key = ContextKey::new(OperatorKind::Sbr, NodeKind::Statement);
        stats.record_outcome(key, OutcomeEvent::Generated).unwrap();
        stats.record_outcome(key, OutcomeEvent::NotUseful).unwrap();
        write_stats(&path, &stats).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("operator,node_kind,generated,survived,killed,please_fix,not_useful\n"));
        assert_eq!(text.lines().count(), 31);
        let back = read_stats(&path).unwrap();
        assert_eq!(back.get(key), stats.get(key));
    }

    #[test]
    fn coverage_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cov.csv");
        let mut cov = CoverageMap::default();
        cov.insert("src/a.mini", 3);
        cov.insert("src/a.mini", 1);
        write_atomic(&path, &coverage_csv(&cov).unwrap()).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "file,line\nsrc/a.mini,1\nsrc/a.mini,3\n");
        assert_eq!(read_coverage(&path).unwrap(), cov);
    }

    #[test]
    fn bad_coverage_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cov.csv");
        fs::write(&path, "path,line\na,1\n").unwrap();
        assert!(read_coverage(&path).is_err());
    }
}
