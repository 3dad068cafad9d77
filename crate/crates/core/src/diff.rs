//! Unified diff parsing and old/new line alignment.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("diff line {line}: {message}")]
pub struct DiffFormatError {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LineKind {
    Context,
    Removed,
    Added,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffLine {
    pub kind: LineKind,
    pub old_line: Option<u32>,
    pub new_line: Option<u32>,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hunk {
    pub old_start: u32,
    pub old_len: u32,
    pub new_start: u32,
    pub new_len: u32,
    pub lines: Vec<DiffLine>,
}

impl Hunk {
    /// First old line after this hunk.
    fn old_end(&self) -> u32 {
        if self.old_len == 0 {
            self.old_start + 1
        } else {
            self.old_start + self.old_len
        }
    }

    fn new_end(&self) -> u32 {
        if self.new_len == 0 {
            self.new_start + 1
        } else {
            self.new_start + self.new_len
        }
    }

    pub fn added(&self) -> impl Iterator<Item = u32> + '_ {
        self.lines
            .iter()
            .filter(|l| l.kind == LineKind::Added)
            .filter_map(|l| l.new_line)
    }

    pub fn removed(&self) -> impl Iterator<Item = u32> + '_ {
        self.lines
            .iter()
            .filter(|l| l.kind == LineKind::Removed)
            .filter_map(|l| l.old_line)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDiff {
    /// `None` for a created file.
    pub old_path: Option<String>,
    /// `None` for a deleted file.
    pub new_path: Option<String>,
    pub hunks: Vec<Hunk>,
}

impl FileDiff {
    /// The head-side path, or the base-side path for deletions.
    pub fn path(&self) -> &str {
        self.new_path
            .as_deref()
            .or(self.old_path.as_deref())
            .unwrap_or("")
    }

    /// Added (including edited) lines, numbered in the new version.
    pub fn added_lines(&self) -> BTreeSet<u32> {
        self.hunks.iter().flat_map(|h| h.added()).collect()
    }

    pub fn removed_lines(&self) -> BTreeSet<u32> {
        self.hunks.iter().flat_map(|h| h.removed()).collect()
    }

    /// Every old-version line shown inside a hunk (context and removed).
    pub fn old_window_lines(&self) -> BTreeSet<u32> {
        self.hunks
            .iter()
            .flat_map(|h| h.lines.iter().filter_map(|l| l.old_line))
            .collect()
    }

    /// Every new-version line shown inside a hunk (context and added).
    pub fn new_window_lines(&self) -> BTreeSet<u32> {
        self.hunks
            .iter()
            .flat_map(|h| h.lines.iter().filter_map(|l| l.new_line))
            .collect()
    }

    /// Maps an unchanged old line to its new number; `None` if it was removed.
    pub fn old_to_new(&self, line: u32) -> Option<u32> {
        let mut delta: i64 = 0;
        for h in &self.hunks {
            if h.old_len > 0 && line >= h.old_start && line < h.old_end() {
                return h
                    .lines
                    .iter()
                    .find(|l| l.old_line == Some(line))
                    .and_then(|l| l.new_line);
            }
            if h.old_end() <= line {
                delta += h.new_len as i64 - h.old_len as i64;
            } else {
                break;
            }
        }
        u32::try_from(line as i64 + delta).ok()
    }

    /// Maps an unchanged new line to its old number; `None` if it was added.
    pub fn new_to_old(&self, line: u32) -> Option<u32> {
        let mut delta: i64 = 0;
        for h in &self.hunks {
            if h.new_len > 0 && line >= h.new_start && line < h.new_end() {
                return h
                    .lines
                    .iter()
                    .find(|l| l.new_line == Some(line))
                    .and_then(|l| l.old_line);
            }
            if h.new_end() <= line {
                delta += h.old_len as i64 - h.new_len as i64;
            } else {
                break;
            }
        }
        u32::try_from(line as i64 + delta).ok()
    }

    fn reversed(&self) -> FileDiff {
        FileDiff {
            old_path: self.new_path.clone(),
            new_path: self.old_path.clone(),
            hunks: self
                .hunks
                .iter()
                .map(|h| Hunk {
                    old_start: h.new_start,
                    old_len: h.new_len,
                    new_start: h.old_start,
                    new_len: h.old_len,
                    lines: reverse_lines(&h.lines),
                })
                .collect(),
        }
    }
}

/// Swaps sides; within each edit run, the new removals are listed before the
/// new additions as unified diff writers do.
fn reverse_lines(lines: &[DiffLine]) -> Vec<DiffLine> {
    let flip = |l: &DiffLine| DiffLine {
        kind: match l.kind {
            LineKind::Context => LineKind::Context,
            LineKind::Removed => LineKind::Added,
            LineKind::Added => LineKind::Removed,
        },
        old_line: l.new_line,
        new_line: l.old_line,
        text: l.text.clone(),
    };
    let mut out = Vec::with_capacity(lines.len());
    let mut i = 0;
    while i < lines.len() {
        if lines[i].kind == LineKind::Context {
            out.push(flip(&lines[i]));
            i += 1;
            continue;
        }
        let start = i;
        while i < lines.len() && lines[i].kind != LineKind::Context {
            i += 1;
        }
        let run = &lines[start..i];
        out.extend(run.iter().filter(|l| l.kind == LineKind::Added).map(flip));
        out.extend(run.iter().filter(|l| l.kind == LineKind::Removed).map(flip));
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeSet {
    pub files: Vec<FileDiff>,
}

impl ChangeSet {
    pub fn file(&self, path: &str) -> Option<&FileDiff> {
        self.files.iter().find(|f| f.path() == path)
    }

    /// Looks a file up by its base-side path.
    pub fn file_by_old_path(&self, path: &str) -> Option<&FileDiff> {
        self.files
            .iter()
            .find(|f| f.old_path.as_deref() == Some(path))
    }

    /// The same change applied in the opposite direction.
    pub fn reversed(&self) -> ChangeSet {
        ChangeSet {
            files: self.files.iter().map(FileDiff::reversed).collect(),
        }
    }
}

fn clean_path(raw: &str) -> Option<String> {
    let raw = raw.split('\t').next().unwrap_or(raw).trim_end();
    if raw == "/dev/null" {
        return None;
    }
    let p = raw
        .strip_prefix("a/")
        .or_else(|| raw.strip_prefix("b/"))
        .unwrap_or(raw);
    Some(p.to_string())
}

fn parse_range(s: &str) -> Option<(u32, u32)> {
    match s.split_once(',') {
        Some((a, b)) => Some((a.parse().ok()?, b.parse().ok()?)),
        None => Some((s.parse().ok()?, 1)),
    }
}

fn parse_hunk_header(line: &str) -> Option<(u32, u32, u32, u32)> {
    let rest = line.strip_prefix("@@ -")?;
    let (ranges, _) = rest.split_once(" @@")?;
    let (old, new) = ranges.split_once(" +")?;
    let (os, ol) = parse_range(old)?;
    let (ns, nl) = parse_range(new)?;
    Some((os, ol, ns, nl))
}

/// Parses a unified diff (as produced by `diff -u` or `git diff`).
pub fn parse_unified_diff(text: &str) -> Result<ChangeSet, DiffFormatError> {
    let lines: Vec<&str> = text.lines().collect();
    let err = |i: usize, message: String| DiffFormatError {
        line: i + 1,
        message,
    };
    let mut files: Vec<FileDiff> = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let line = lines[i];
        if let Some(old) = line.strip_prefix("--- ") {
            let Some(new) = lines.get(i + 1).and_then(|l| l.strip_prefix("+++ ")) else {
                return Err(err(i + 1, "expected `+++` header after `---`".to_string()));
            };
            files.push(FileDiff {
                old_path: clean_path(old),
                new_path: clean_path(new),
                hunks: Vec::new(),
            });
            i += 2;
            continue;
        }
        if line.starts_with("@@") {
            let Some(file) = files.last_mut() else {
                return Err(err(i, "hunk before any file header".to_string()));
            };
            let (os, ol, ns, nl) = parse_hunk_header(line)
                .ok_or_else(|| err(i, format!("malformed hunk header `{line}`")))?;
            if let Some(prev) = file.hunks.last() {
                if os < prev.old_end() || ns < prev.new_end() {
                    return Err(err(i, "hunks overlap or are out of order".to_string()));
                }
            }
            let (mut old_no, mut new_no) = (os, ns);
            let (mut old_left, mut new_left) = (ol, nl);
            let mut body = Vec::new();
            i += 1;
            while old_left > 0 || new_left > 0 {
                let Some(&l) = lines.get(i) else {
                    return Err(err(i, "unexpected end of diff inside hunk".to_string()));
                };
                let (kind, text) = match l.chars().next() {
                    Some(' ') => (LineKind::Context, &l[1..]),
                    None => (LineKind::Context, ""),
                    Some('-') => (LineKind::Removed, &l[1..]),
                    Some('+') => (LineKind::Added, &l[1..]),
                    Some('\\') => {
                        i += 1;
                        continue;
                    }
                    Some(_) => return Err(err(i, format!("unexpected line in hunk: `{l}`"))),
                };
                let (old_line, new_line) = match kind {
                    LineKind::Context => (Some(old_no), Some(new_no)),
                    LineKind::Removed => (Some(old_no), None),
                    LineKind::Added => (None, Some(new_no)),
                };
                if old_line.is_some() {
                    if old_left == 0 {
                        return Err(err(i, "hunk has more old lines than its header says".to_string()));
                    }
                    old_left -= 1;
                    old_no += 1;
                }
                if new_line.is_some() {
                    if new_left == 0 {
                        return Err(err(i, "hunk has more new lines than its header says".to_string()));
                    }
                    new_left -= 1;
                    new_no += 1;
                }
                body.push(DiffLine {
                    kind,
                    old_line,
                    new_line,
                    text: text.to_string(),
                });
                i += 1;
            }
            while lines.get(i).is_some_and(|l| l.starts_with('\\')) {
                i += 1;
            }
            file.hunks.push(Hunk {
                old_start: os,
                old_len: ol,
                new_start: ns,
                new_len: nl,
                lines: body,
            });
            continue;
        }
        // `diff --git`, `index`, mode lines and free text between files
        i += 1;
    }
    Ok(ChangeSet { files })
}
