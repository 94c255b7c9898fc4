//! Append-only journal: one JSON record per line.
//!
//! ```text
//! {"seq":1,"kind":"triple_add","payload":{"user":"ann","tag":"tech","resource":"http://a.com/","created_at":17}}
//! {"seq":2,"kind":"title_set","payload":{"user":"ann","resource":"http://a.com/","title":"A"}}
//! ```
//!
//! Records are fsynced before the corresponding mutation is applied in
//! memory. Replaying every record in order rebuilds the store and the click
//! log exactly.

use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tagmap_core::{ClickEvent, Mutation, ResourceId, TagLabel, Triple, UserId};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JournalError {
    #[error("journal {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("journal {path} line {line}: {source}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("journal {path} line {line}: sequence number {seq} does not follow {prev}")]
    OutOfOrder {
        path: PathBuf,
        line: usize,
        seq: u64,
        prev: u64,
    },
    #[error("journal write failed: {0}")]
    Write(#[source] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum JournalEntry {
    TripleAdd(Triple),
    TripleRemove {
        user: UserId,
        tag: TagLabel,
        resource: ResourceId,
    },
    TitleSet {
        user: UserId,
        resource: ResourceId,
        title: String,
    },
    Event(ClickEvent),
}

impl From<Mutation> for JournalEntry {
    fn from(m: Mutation) -> Self {
        match m {
            Mutation::AddTriple(t) => JournalEntry::TripleAdd(t),
            Mutation::RemoveTriple {
                user,
                tag,
                resource,
            } => JournalEntry::TripleRemove {
                user,
                tag,
                resource,
            },
            Mutation::SetTitle {
                user,
                resource,
                title,
            } => JournalEntry::TitleSet {
                user,
                resource,
                title,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JournalRecord {
    pub seq: u64,
    #[serde(flatten)]
    pub entry: JournalEntry,
}

/// Durable byte sink behind the journal.
pub trait Sink: Send {
    /// Appends `bytes` and makes them durable, or leaves the sink as it was.
    fn append(&mut self, bytes: &[u8]) -> io::Result<()>;
}

pub struct FileSink {
    file: File,
}

impl Sink for FileSink {
    fn append(&mut self, bytes: &[u8]) -> io::Result<()> {
        let len = self.file.seek(SeekFrom::End(0))?;
        let result = self
            .file
            .write_all(bytes)
            .and_then(|()| self.file.sync_data());
        if result.is_err() {
            // Drop a torn tail so the journal stays replayable.
            let _ = self.file.set_len(len);
        }
        result
    }
}

pub struct Journal {
    sink: Box<dyn Sink>,
    last_seq: u64,
}

impl Journal {
    /// Opens (creating if needed) the journal at `path` and returns it with
    /// every record already stored there.
    pub fn open(path: &Path) -> Result<(Journal, Vec<JournalRecord>), JournalError> {
        let io_err = |source| JournalError::Io {
            path: path.to_path_buf(),
            source,
        };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(io_err)?;
        }
        let file = OpenOptions::new()
            .create(true)
            .read(true)
            .append(true)
            .open(path)
            .map_err(io_err)?;
        let records = read_records(path, BufReader::new(&file))?;
        let last_seq = records.last().map_or(0, |r| r.seq);
        Ok((
            Journal {
                sink: Box::new(FileSink { file }),
                last_seq,
            },
            records,
        ))
    }

    pub fn with_sink(sink: Box<dyn Sink>, last_seq: u64) -> Journal {
        Journal { sink, last_seq }
    }

    pub fn last_seq(&self) -> u64 {
        self.last_seq
    }

    /// Continue numbering after `seq` if it is ahead (e.g. a snapshot newer
    /// than the journal tail).
    pub fn skip_to(&mut self, seq: u64) {
        self.last_seq = self.last_seq.max(seq);
    }

    /// Durably appends `entries` as consecutive records. On failure nothing
    /// is considered written and the sequence counter is unchanged.
    pub fn append(
        &mut self,
        entries: Vec<JournalEntry>,
    ) -> Result<Vec<JournalRecord>, JournalError> {
        let records: Vec<JournalRecord> = entries
            .into_iter()
            .zip(self.last_seq + 1..)
            .map(|(entry, seq)| JournalRecord { seq, entry })
            .collect();
        if records.is_empty() {
            return Ok(records);
        }
        let mut buf = Vec::new();
        for r in &records {
            serde_json::to_writer(&mut buf, r).expect("journal records serialize");
            buf.push(b'\n');
        }
        self.sink.append(&buf).map_err(JournalError::Write)?;
        self.last_seq = records.last().map_or(self.last_seq, |r| r.seq);
        Ok(records)
    }
}

/// Parses journal lines, rejecting malformed lines and non-increasing
/// sequence numbers. Blank lines are ignored.
pub fn read_records(path: &Path, reader: impl BufRead) -> Result<Vec<JournalRecord>, JournalError> {
    let mut records: Vec<JournalRecord> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| JournalError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: JournalRecord =
            serde_json::from_str(&line).map_err(|source| JournalError::Corrupt {
                path: path.to_path_buf(),
                line: i + 1,
                source,
            })?;
        if let Some(prev) = records.last() {
            if record.seq <= prev.seq {
                return Err(JournalError::OutOfOrder {
                    path: path.to_path_buf(),
                    line: i + 1,
                    seq: record.seq,
                    prev: prev.seq,
                });
            }
        }
        records.push(record);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triple() -> Triple {
        Triple {
            user: UserId::new("ann").unwrap(),
            tag: "tech".to_string().try_into().unwrap(),
            resource: "http://a.com/".to_string().try_into().unwrap(),
            created_at: 17,
        }
    }

    #[test]
    fn record_line_format() {
        let record = JournalRecord {
            seq: 1,
            entry: JournalEntry::TripleAdd(triple()),
        };
        let line = serde_json::to_string(&record).unwrap();
        assert_eq!(
            line,
            r#"{"seq":1,"kind":"triple_add","payload":{"user":"ann","tag":"tech","resource":"http://a.com/","created_at":17}}"#
        );
        let back: JournalRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(back, record);
    }

    #[test]
    fn append_and_reopen() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/journal.jsonl");
        let (mut journal, existing) = Journal::open(&path).unwrap();
        assert!(existing.is_empty());
        let written = journal
            .append(vec![
                JournalEntry::TripleAdd(triple()),
                JournalEntry::TitleSet {
                    user: UserId::new("ann").unwrap(),
                    resource: "http://a.com/".to_string().try_into().unwrap(),
                    title: "A".into(),
                },
            ])
            .unwrap();
        assert_eq!(written.iter().map(|r| r.seq).collect::<Vec<_>>(), [1, 2]);
        drop(journal);

        let (journal, records) = Journal::open(&path).unwrap();
        assert_eq!(records, written);
        assert_eq!(journal.last_seq(), 2);
    }

    #[test]
    fn corrupt_line_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("journal.jsonl");
        let good = serde_json::to_string(&JournalRecord {
            seq: 1,
            entry: JournalEntry::TripleAdd(triple()),
        })
        .unwrap();
        std::fs::write(&path, format!("{good}\n{{\"seq\":2,\"kind\":\"tri")).unwrap();
        match Journal::open(&path) {
            Err(JournalError::Corrupt { line, .. }) => assert_eq!(line, 2),
            Err(other) => panic!("unexpected error {other}"),
            Ok(_) => panic!("corrupt journal accepted"),
        }
    }

    #[test]
    fn sequence_must_increase() {
        let line = |seq| {
            serde_json::to_string(&JournalRecord {
                seq,
                entry: JournalEntry::TripleAdd(triple()),
            })
            .unwrap()
        };
        let text = format!("{}\n{}\n", line(3), line(3));
        let err = read_records(Path::new("j"), text.as_bytes()).unwrap_err();
        assert!(matches!(err, JournalError::OutOfOrder { line: 2, .. }));
    }

    struct Broken;

    impl Sink for Broken {
        fn append(&mut self, _: &[u8]) -> io::Result<()> {
            Err(io::Error::other("disk full"))
        }
    }

    #[test]
    fn failed_write_keeps_sequence() {
        let mut journal = Journal::with_sink(Box::new(Broken), 4);
        assert!(journal
            .append(vec![JournalEntry::TripleAdd(triple())])
            .is_err());
        assert_eq!(journal.last_seq(), 4);
    }
}
