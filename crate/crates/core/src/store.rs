//! Task database: one JSON task per line, keyed on the command template.
//!
//! A [`TaskStore`] is the single writer for its file. It holds an advisory
//! lock on `<path>.lock` for its whole lifetime and rewrites the file
//! atomically (temp file + rename) after every mutation, so the file on disk
//! is always compact and complete.

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::error::ModelError;
use crate::learner::unix_now;
use crate::model::{Task, TaskId};

pub const DEFAULT_STORE_PATH: &str = "./helpa_tasks.jsonl";
pub const STORE_ENV_VAR: &str = "HELPA_STORE";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("task store I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("store {0} is locked by another writer")]
    Locked(PathBuf),
    #[error("a task with this template already exists (id {0}); use force to replace it")]
    DuplicateTemplate(TaskId),
    #[error("no task with id {0}")]
    NotFound(TaskId),
    #[error(transparent)]
    InvalidTask(#[from] ModelError),
}

impl StoreError {
    pub fn code(&self) -> &'static str {
        match self {
            StoreError::Io { .. } => "io_error",
            StoreError::Corrupt { .. } => "corrupt_store",
            StoreError::Locked(_) => "store_locked",
            StoreError::DuplicateTemplate(_) => "duplicate_template",
            StoreError::NotFound(_) => "not_found",
            StoreError::InvalidTask(_) => "invalid_task",
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_owned(),
        source,
    }
}

#[derive(Debug)]
pub struct TaskStore {
    path: PathBuf,
    tasks: Vec<Task>,
    _lock: File,
}

impl TaskStore {
    /// Opens (or creates) the store at `path` for writing.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref().to_owned();
        let lock_path = lock_path(&path);
        let lock = OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(&lock_path)
            .map_err(io_err(&lock_path))?;
        match lock.try_lock() {
            Ok(()) => {}
            Err(fs::TryLockError::WouldBlock) => return Err(StoreError::Locked(path)),
            Err(fs::TryLockError::Error(e)) => return Err(io_err(&lock_path)(e)),
        }
        let tasks = load(&path)?;
        Ok(TaskStore {
            path,
            tasks,
            _lock: lock,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// All tasks in creation order.
    pub fn list(&self) -> &[Task] {
        &self.tasks
    }

    pub fn snapshot(&self) -> Vec<Task> {
        self.tasks.clone()
    }

    pub fn get(&self, id: TaskId) -> Option<&Task> {
        self.tasks.iter().find(|t| t.id == id)
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    /// Stores `task` under a fresh id. A task whose template has the same
    /// key is an error unless `force` is set, in which case the new task
    /// takes over the old one's id and position.
    pub fn save(&mut self, mut task: Task, force: bool) -> Result<TaskId, StoreError> {
        task.validate()?;
        let existing = {
            let key = task.template.key();
            self.tasks.iter().position(|t| t.template.key() == key)
        };
        let id = match existing {
            Some(i) if !force => return Err(StoreError::DuplicateTemplate(self.tasks[i].id)),
            Some(i) => {
                let old = &self.tasks[i];
                task.id = old.id;
                task.created_at = old.created_at;
                let mut next = self.tasks.clone();
                next[i] = task;
                self.commit(next)?;
                self.tasks[i].id
            }
            None => {
                task.id = TaskId(self.tasks.iter().map(|t| t.id.0).max().unwrap_or(0) + 1);
                task.created_at = unix_now();
                let id = task.id;
                let mut next = self.tasks.clone();
                next.push(task);
                self.commit(next)?;
                id
            }
        };
        Ok(id)
    }

    pub fn delete(&mut self, id: TaskId) -> Result<Task, StoreError> {
        let i = self
            .tasks
            .iter()
            .position(|t| t.id == id)
            .ok_or(StoreError::NotFound(id))?;
        let mut next = self.tasks.clone();
        let removed = next.remove(i);
        self.commit(next)?;
        Ok(removed)
    }

    fn commit(&mut self, tasks: Vec<Task>) -> Result<(), StoreError> {
        write_atomically(&self.path, &tasks)?;
        self.tasks = tasks;
        Ok(())
    }
}

fn lock_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_owned();
    name.push(".lock");
    path.with_file_name(name)
}

fn write_atomically(path: &Path, tasks: &[Task]) -> Result<(), StoreError> {
    let mut tmp_name = path.file_name().unwrap_or_default().to_owned();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    {
        let mut out = io::BufWriter::new(File::create(&tmp).map_err(io_err(&tmp))?);
        for t in tasks {
            let line = serde_json::to_string(t).expect("tasks serialize");
            writeln!(out, "{line}").map_err(io_err(&tmp))?;
        }
        let file = out.into_inner().map_err(|e| io_err(&tmp)(e.into_error()))?;
        file.sync_all().map_err(io_err(&tmp))?;
    }
    fs::rename(&tmp, path).map_err(io_err(path))
}

/// Reads the tasks at `path` without taking the writer lock. A missing
/// file is an empty store.
pub fn load(path: impl AsRef<Path>) -> Result<Vec<Task>, StoreError> {
    let path = path.as_ref();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(io_err(path)(e)),
    };
    let mut tasks = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let corrupt = |message: String| StoreError::Corrupt {
            path: path.to_owned(),
            line: n + 1,
            message,
        };
        let task: Task = serde_json::from_str(&line).map_err(|e| corrupt(e.to_string()))?;
        task.validate().map_err(|e| corrupt(e.to_string()))?;
        tasks.push(task);
    }
    Ok(tasks)
}

/// Store path from an explicit flag, then `HELPA_STORE`, then the default.
pub fn resolve_path(flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_owned)
        .or_else(|| std::env::var_os(STORE_ENV_VAR).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_STORE_PATH))
}
