//! In-memory service state and its snapshot file.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tagmap_core::{ClickEvent, Folksonomy, Mutation, StoreImage};
use thiserror::Error;

use crate::journal::{JournalEntry, JournalRecord};

pub const SNAPSHOT_VERSION: u32 = 1;

/// Everything the journal rebuilds: the folksonomy, the click log, and the
/// sequence number of the last record applied.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AppState {
    pub store: Folksonomy,
    pub events: Vec<ClickEvent>,
    pub last_seq: u64,
}

impl AppState {
    pub fn apply(&mut self, record: &JournalRecord) {
        match &record.entry {
            JournalEntry::TripleAdd(t) => {
                self.store.apply(&Mutation::AddTriple(t.clone()));
            }
            JournalEntry::TripleRemove {
                user,
                tag,
                resource,
            } => {
                self.store.apply(&Mutation::RemoveTriple {
                    user: user.clone(),
                    tag: tag.clone(),
                    resource: resource.clone(),
                });
            }
            JournalEntry::TitleSet {
                user,
                resource,
                title,
            } => {
                self.store.apply(&Mutation::SetTitle {
                    user: user.clone(),
                    resource: resource.clone(),
                    title: title.clone(),
                });
            }
            JournalEntry::Event(e) => self.events.push(e.clone()),
        }
        self.last_seq = self.last_seq.max(record.seq);
    }

    pub fn replay<'a>(records: impl IntoIterator<Item = &'a JournalRecord>) -> Self {
        let mut state = AppState::default();
        for r in records {
            state.apply(r);
        }
        state
    }
}

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("snapshot {path}: {source}")]
    Format {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("snapshot {path} has version {found}, expected {SNAPSHOT_VERSION}")]
    Version { path: PathBuf, found: u32 },
}

#[derive(Serialize, Deserialize)]
struct SnapshotFile {
    version: u32,
    seq: u64,
    store: StoreImage,
    events: Vec<ClickEvent>,
}

#[derive(Deserialize)]
struct VersionProbe {
    version: u32,
}

/// Writes `state` to `path` atomically (temp file + rename).
pub fn write_snapshot(state: &AppState, path: &Path) -> Result<(), SnapshotError> {
    let io_err = |source| SnapshotError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = SnapshotFile {
        version: SNAPSHOT_VERSION,
        seq: state.last_seq,
        store: state.store.export(),
        events: state.events.clone(),
    };
    let bytes = serde_json::to_vec(&file).map_err(|source| SnapshotError::Format {
        path: path.to_path_buf(),
        source,
    })?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err)?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(io_err)?;
    fs::File::open(&tmp)
        .and_then(|f| f.sync_all())
        .map_err(io_err)?;
    fs::rename(&tmp, path).map_err(io_err)
}

pub fn load_snapshot(path: &Path) -> Result<AppState, SnapshotError> {
    let bytes = fs::read(path).map_err(|source| SnapshotError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let format = |source| SnapshotError::Format {
        path: path.to_path_buf(),
        source,
    };
    let probe: VersionProbe = serde_json::from_slice(&bytes).map_err(format)?;
    if probe.version != SNAPSHOT_VERSION {
        return Err(SnapshotError::Version {
            path: path.to_path_buf(),
            found: probe.version,
        });
    }
    let file: SnapshotFile = serde_json::from_slice(&bytes).map_err(format)?;
    Ok(AppState {
        store: Folksonomy::import(file.store),
        events: file.events,
        last_seq: file.seq,
    })
}
