//! Problem storage: one JSON file per problem in a data directory.
//!
//! The in-memory index maps ids to immutable snapshots behind a lock, so a
//! reader always holds one complete revision while a writer swaps in the
//! next. Writes go to a temporary file first and are renamed into place.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use morphsynth::ProblemDocument;
use serde::{Deserialize, Serialize};

use crate::error::AppError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StoredProblem {
    pub id: String,
    pub revision: u64,
    pub document: ProblemDocument,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemSummary {
    pub id: String,
    pub revision: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

#[derive(Debug)]
pub struct ProblemStore {
    dir: PathBuf,
    problems: RwLock<BTreeMap<String, Arc<StoredProblem>>>,
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> AppError {
    AppError::Io(format!("{}: {e}", path.display()))
}

pub fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

impl ProblemStore {
    /// Open (creating if needed) a data directory and load every `*.json`
    /// problem file in it. A file that fails to parse or validate aborts the
    /// open rather than being silently skipped.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, AppError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| io_error(&dir, e))?;
        let mut problems = BTreeMap::new();
        let entries = fs::read_dir(&dir).map_err(|e| io_error(&dir, e))?;
        for entry in entries {
            let path = entry.map_err(|e| io_error(&dir, e))?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let bytes = fs::read(&path).map_err(|e| io_error(&path, e))?;
            let stored: StoredProblem = serde_json::from_slice(&bytes).map_err(|e| io_error(&path, e))?;
            stored.document.check().map_err(|e| io_error(&path, e))?;
            if path.file_stem().and_then(|s| s.to_str()) != Some(stored.id.as_str()) {
                return Err(io_error(&path, format!("file name does not match id `{}`", stored.id)));
            }
            problems.insert(stored.id.clone(), Arc::new(stored));
        }
        Ok(Self { dir, problems: RwLock::new(problems) })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn list(&self) -> Vec<ProblemSummary> {
        let problems = self.problems.read().expect("store lock poisoned");
        problems
            .values()
            .map(|p| ProblemSummary { id: p.id.clone(), revision: p.revision, name: p.document.name.clone() })
            .collect()
    }

    pub fn get(&self, id: &str) -> Result<Arc<StoredProblem>, AppError> {
        let problems = self.problems.read().expect("store lock poisoned");
        problems.get(id).cloned().ok_or_else(|| AppError::NotFound(id.to_string()))
    }

    /// Store a new problem at revision 1. Without an id, the first free
    /// `p<N>` is used.
    pub fn create(&self, id: Option<&str>, document: ProblemDocument) -> Result<Arc<StoredProblem>, AppError> {
        document.check()?;
        let mut problems = self.problems.write().expect("store lock poisoned");
        let id = match id {
            Some(id) if !valid_id(id) => return Err(AppError::BadRequest(format!("invalid problem id `{id}`"))),
            Some(id) if problems.contains_key(id) => {
                return Err(AppError::BadRequest(format!("problem `{id}` already exists")));
            }
            Some(id) => id.to_string(),
            None => (1..).map(|n| format!("p{n}")).find(|c| !problems.contains_key(c)).expect("unbounded"),
        };
        let stored = Arc::new(StoredProblem { id: id.clone(), revision: 1, document });
        self.write_file(&stored)?;
        problems.insert(id, stored.clone());
        Ok(stored)
    }

    /// Replace a problem's document when `revision` is still current.
    pub fn update(&self, id: &str, revision: u64, document: ProblemDocument) -> Result<Arc<StoredProblem>, AppError> {
        document.check()?;
        let mut problems = self.problems.write().expect("store lock poisoned");
        let current = problems.get(id).ok_or_else(|| AppError::NotFound(id.to_string()))?;
        if current.revision != revision {
            return Err(AppError::Conflict { current: current.revision, given: revision });
        }
        let stored = Arc::new(StoredProblem { id: id.to_string(), revision: revision + 1, document });
        self.write_file(&stored)?;
        problems.insert(id.to_string(), stored.clone());
        Ok(stored)
    }

    fn write_file(&self, stored: &StoredProblem) -> Result<(), AppError> {
        let path = self.dir.join(format!("{}.json", stored.id));
        let tmp = self.dir.join(format!(".{}.json.tmp", stored.id));
        let mut text = serde_json::to_string_pretty(stored).expect("problems always serialize");
        text.push('\n');
        fs::write(&tmp, text).map_err(|e| io_error(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| io_error(&path, e))
    }
}
