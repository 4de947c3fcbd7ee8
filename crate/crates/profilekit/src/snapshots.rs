//! Snapshot persistence: one append-only JSONL file per user, one
//! [`ProfileSnapshot`] per line, oldest first. Reads are latest-wins: the
//! last line is the current profile. Appends must raise the version and
//! must not move `as_of` backwards.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use profilekit_core::profile::ProfileSnapshot;

use crate::io::{read_jsonl, IoError};

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{path}: {message}")]
    Order { path: PathBuf, message: String },
}

/// Every stored version, oldest first. A missing file is an empty history.
pub fn history(path: &Path) -> Result<Vec<ProfileSnapshot>, StoreError> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    Ok(read_jsonl(path)?)
}

pub fn latest(path: &Path) -> Result<Option<ProfileSnapshot>, StoreError> {
    Ok(history(path)?.pop())
}

pub fn append(path: &Path, snap: &ProfileSnapshot) -> Result<(), StoreError> {
    let order = |message: String| StoreError::Order {
        path: path.to_path_buf(),
        message,
    };
    if let Some(prev) = latest(path)? {
        if prev.user_id != snap.user_id {
            return Err(order(format!("holds {}, not {}", prev.user_id, snap.user_id)));
        }
        if snap.version <= prev.version {
            return Err(order(format!("version {} does not follow {}", snap.version, prev.version)));
        }
        if snap.as_of < prev.as_of {
            return Err(order(format!("as_of {} precedes {}", snap.as_of, prev.as_of)));
        }
    }
    let io = |source| {
        StoreError::Io(IoError::Io {
            path: path.to_path_buf(),
            source,
        })
    };
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    let mut f = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
    let line = serde_json::to_string(snap).expect("snapshots serialize");
    writeln!(f, "{line}").map_err(io)
}

/// A directory of per-user snapshot files named `<user_id>.jsonl`.
#[derive(Debug, Clone)]
pub struct SnapshotStore {
    pub root: PathBuf,
}

impl SnapshotStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn path_for(&self, user_id: &str) -> PathBuf {
        self.root.join(format!("{user_id}.jsonl"))
    }

    pub fn latest(&self, user_id: &str) -> Result<Option<ProfileSnapshot>, StoreError> {
        latest(&self.path_for(user_id))
    }

    pub fn append(&self, snap: &ProfileSnapshot) -> Result<(), StoreError> {
        append(&self.path_for(&snap.user_id), snap)
    }
}
