//! Loading subject projects and bug cases from disk.

use std::fs;
use std::path::{Path, PathBuf};

use mutest_core::coupling::BugCase;
use mutest_core::diff::{parse_unified_diff, DiffFormatError};
use mutest_core::lang::{parse_source, ParseError, SubjectModule};
use mutest_core::project::Project;

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
    #[error("{path}: {source}")]
    Diff {
        path: PathBuf,
        #[source]
        source: DiffFormatError,
    },
    #[error("{0}: not a directory")]
    NotADirectory(PathBuf),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> LoadError + '_ {
    move |source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn read_text(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(io_err(path))
}

/// `.mini` files directly inside `dir`, sorted by name. A missing directory
/// reads as empty.
fn modules_in(root: &Path, sub: &str) -> Result<Vec<SubjectModule>, LoadError> {
    let dir = root.join(sub);
    if !dir.exists() {
        return Ok(Vec::new());
    }
    let mut names: Vec<String> = fs::read_dir(&dir)
        .map_err(io_err(&dir))?
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_file())
        .filter_map(|e| e.file_name().into_string().ok())
        .filter(|n| n.ends_with(".mini"))
        .collect();
    names.sort();
    names
        .into_iter()
        .map(|name| {
            let path = dir.join(&name);
            let text = read_text(&path)?;
            parse_source(&text, &format!("{sub}/{name}")).map_err(|source| LoadError::Parse { path, source })
        })
        .collect()
}

/// Reads a project laid out as `src/*.mini` (program) and `tests/*.mini`.
/// Module paths are relative to the project root, e.g. `src/calc.mini`.
pub fn load_project(root: &Path) -> Result<Project, LoadError> {
    if !root.is_dir() {
        return Err(LoadError::NotADirectory(root.to_path_buf()));
    }
    Ok(Project::new(modules_in(root, "src")?, modules_in(root, "tests")?))
}

pub fn load_diff(path: &Path) -> Result<mutest_core::diff::ChangeSet, LoadError> {
    let text = read_text(path)?;
    parse_unified_diff(&text).map_err(|source| LoadError::Diff {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads `<dir>/buggy`, `<dir>/fixed` and `<dir>/fix.diff`; the bug id is
/// the directory name.
pub fn load_bug(dir: &Path) -> Result<BugCase, LoadError> {
    if !dir.is_dir() {
        return Err(LoadError::NotADirectory(dir.to_path_buf()));
    }
    let id = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(BugCase {
        id,
        buggy: load_project(&dir.join("buggy"))?,
        fixed: load_project(&dir.join("fixed"))?,
        fix_diff: load_diff(&dir.join("fix.diff"))?,
    })
}

/// Subdirectories of `dir`, sorted by name.
pub fn subdirs(dir: &Path) -> Result<Vec<PathBuf>, LoadError> {
    let mut out: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_dir())
        .collect();
    out.sort();
    Ok(out)
}
