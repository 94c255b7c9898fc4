//! Thread-safe service: one serialized writer, many concurrent readers.
//!
//! A mutation is planned against the current state, journaled, and only then
//! applied. The journal mutex is held for the whole sequence, so the state a
//! plan was computed from is still current when it is applied. Readers take
//! the state lock only, and never observe a half-applied plan.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use parking_lot::{Mutex, RwLock};
use tagmap_core::{
    plan_drag, ClickEvent, ContextError, DragEffect, Folksonomy, FolksonomyError, NodeRef, Plan,
    ResourceId, TagLabel, Triple, UserId,
};
use thiserror::Error;

use crate::journal::{Journal, JournalEntry, JournalError, JournalRecord};
use crate::state::{load_snapshot, write_snapshot, AppState, SnapshotError};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error(transparent)]
    Folksonomy(#[from] FolksonomyError),
    #[error(transparent)]
    Context(#[from] ContextError),
    #[error(transparent)]
    Journal(#[from] JournalError),
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
}

pub type Clock = Arc<dyn Fn() -> i64 + Send + Sync>;

pub fn system_clock() -> Clock {
    Arc::new(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs() as i64)
    })
}

pub struct Service {
    state: RwLock<AppState>,
    journal: Mutex<Journal>,
    clock: Clock,
    snapshot_path: Option<PathBuf>,
}

impl Service {
    /// Rebuilds state from the snapshot (if one exists at `snapshot`) plus
    /// the journal records that follow it.
    pub fn open(journal_path: &Path, snapshot: Option<&Path>) -> Result<Service, ServiceError> {
        let mut state = match snapshot {
            Some(path) if path.exists() => load_snapshot(path)?,
            _ => AppState::default(),
        };
        let (mut journal, records) = Journal::open(journal_path)?;
        let base = state.last_seq;
        for record in records.iter().filter(|r| r.seq > base) {
            state.apply(record);
        }
        journal.skip_to(state.last_seq);
        let mut service = Service::with_journal(journal, state);
        service.snapshot_path = snapshot.map(Path::to_path_buf);
        Ok(service)
    }

    pub fn with_journal(journal: Journal, state: AppState) -> Service {
        Service {
            state: RwLock::new(state),
            journal: Mutex::new(journal),
            clock: system_clock(),
            snapshot_path: None,
        }
    }

    pub fn with_clock(mut self, clock: Clock) -> Service {
        self.clock = clock;
        self
    }

    pub fn now(&self) -> i64 {
        (self.clock)()
    }

    /// Runs `f` against a consistent view of the state.
    pub fn read<T>(&self, f: impl FnOnce(&AppState) -> T) -> T {
        f(&self.state.read())
    }

    pub fn state(&self) -> AppState {
        self.state.read().clone()
    }

    /// Durably appends `entries` and then applies them. On a write failure
    /// nothing is applied.
    pub fn append_and_apply(
        &self,
        entries: Vec<JournalEntry>,
    ) -> Result<Vec<JournalRecord>, ServiceError> {
        let mut journal = self.journal.lock();
        self.commit(&mut journal, entries)
    }

    fn commit(
        &self,
        journal: &mut Journal,
        entries: Vec<JournalEntry>,
    ) -> Result<Vec<JournalRecord>, ServiceError> {
        let records = journal.append(entries)?;
        let mut state = self.state.write();
        for r in &records {
            state.apply(r);
        }
        Ok(records)
    }

    fn mutate<T, E>(
        &self,
        plan: impl FnOnce(&Folksonomy, i64) -> Result<Plan<T>, E>,
    ) -> Result<T, ServiceError>
    where
        ServiceError: From<E>,
    {
        let mut journal = self.journal.lock();
        let now = self.now();
        let plan = plan(&self.state.read().store, now)?;
        self.commit(
            &mut journal,
            plan.mutations.into_iter().map(JournalEntry::from).collect(),
        )?;
        Ok(plan.output)
    }

    pub fn add_annotation(
        &self,
        user: &UserId,
        url: &str,
        title: &str,
        tags: &[String],
    ) -> Result<Vec<Triple>, ServiceError> {
        self.mutate(|s, now| s.plan_add_annotation(user, url, title, tags, now))
    }

    pub fn remove_resource(
        &self,
        user: &UserId,
        resource: &ResourceId,
    ) -> Result<usize, ServiceError> {
        self.mutate(|s, _| Ok::<_, FolksonomyError>(s.plan_remove_resource(user, resource)))
    }

    pub fn set_tags(
        &self,
        user: &UserId,
        resource: &ResourceId,
        tags: &[String],
    ) -> Result<(Vec<TagLabel>, Vec<TagLabel>), ServiceError> {
        self.mutate(|s, now| s.plan_set_tags(user, resource, tags, now))
    }

    pub fn set_title(
        &self,
        user: &UserId,
        resource: &ResourceId,
        title: &str,
    ) -> Result<(), ServiceError> {
        self.mutate(|s, _| s.plan_set_title(user, resource, title))
    }

    pub fn rename_tag(
        &self,
        user: &UserId,
        old: &TagLabel,
        new: &str,
    ) -> Result<usize, ServiceError> {
        self.mutate(|s, now| s.plan_rename_tag(user, old, new, now))
    }

    pub fn drag(
        &self,
        user: &UserId,
        dragged: &NodeRef,
        target: &NodeRef,
    ) -> Result<DragEffect, ServiceError> {
        self.mutate(|s, now| plan_drag(s, user, dragged, target, now))
    }

    pub fn record_events(&self, events: Vec<ClickEvent>) -> Result<usize, ServiceError> {
        let n = events.len();
        self.append_and_apply(events.into_iter().map(JournalEntry::Event).collect())?;
        Ok(n)
    }

    /// Writes a snapshot of the current state. Writers are blocked while it
    /// is taken so it matches a journal prefix exactly.
    pub fn snapshot(&self, path: &Path) -> Result<u64, ServiceError> {
        let _journal = self.journal.lock();
        let state = self.state.read();
        write_snapshot(&state, path)?;
        Ok(state.last_seq)
    }

    pub fn snapshot_path(&self) -> Option<&Path> {
        self.snapshot_path.as_deref()
    }
}
