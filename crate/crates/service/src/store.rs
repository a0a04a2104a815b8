//! Append-only game-log storage keyed by session id.
//!
//! On disk the layout is
//!
//! ```text
//! <root>/sessions/<id>.json  lobby record, rewritten on every status change
//! <root>/live/<id>.jsonl     written while the game runs, one line per event
//! <root>/games/<id>.jsonl    the archived replay, written once
//! ```
//!
//! Without a root directory the store keeps archives in memory, which is what
//! the tests and examples use.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use uuid::Uuid;

use techdebt_core::session::ReplayError;
use techdebt_core::ReplayFile;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("no archived game with id '{0}'")]
    NotFound(String),
    #[error("'{0}' is not a session id")]
    BadId(String),
    #[error("archive for '{0}' already holds a different game")]
    Conflict(String),
    #[error(transparent)]
    Replay(#[from] ReplayError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchiveReceipt {
    pub session_id: String,
    pub events: usize,
    /// False when this call found the game already archived.
    pub created: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Default)]
pub struct GameStore {
    root: Option<PathBuf>,
    memory: Mutex<HashMap<String, String>>,
}

fn check_id(id: &str) -> Result<(), StoreError> {
    Uuid::parse_str(id)
        .map(|_| ())
        .map_err(|_| StoreError::BadId(id.to_string()))
}

impl GameStore {
    pub fn in_memory() -> Self {
        GameStore::default()
    }

    pub fn on_disk(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        fs::create_dir_all(root.join("live"))?;
        fs::create_dir_all(root.join("games"))?;
        fs::create_dir_all(root.join("sessions"))?;
        Ok(GameStore {
            root: Some(root),
            memory: Mutex::default(),
        })
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    fn archive_path(&self, id: &str) -> Option<PathBuf> {
        self.root.as_ref().map(|r| r.join("games").join(format!("{id}.jsonl")))
    }

    /// Open the running log for a session. `None` for an in-memory store.
    pub fn open_live(&self, id: &str) -> Result<Option<LiveLog>, StoreError> {
        check_id(id)?;
        let Some(root) = &self.root else {
            return Ok(None);
        };
        let path = root.join("live").join(format!("{id}.jsonl"));
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(Some(LiveLog { file, path }))
    }

    /// Write a session's lobby record. A no-op for an in-memory store.
    pub fn save_record(&self, id: &str, record: &impl Serialize) -> Result<(), StoreError> {
        check_id(id)?;
        let Some(root) = &self.root else {
            return Ok(());
        };
        let path = root.join("sessions").join(format!("{id}.json"));
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, serde_json::to_vec_pretty(record).expect("record serializes"))?;
        fs::rename(tmp, path)?;
        Ok(())
    }

    /// Store a finished game's replay. Archiving the same game again is a
    /// no-op; an existing archive is never overwritten.
    pub fn archive(&self, id: &str, replay: &ReplayFile) -> Result<ArchiveReceipt, StoreError> {
        check_id(id)?;
        let text = replay.to_jsonl();
        let receipt = |created| ArchiveReceipt {
            session_id: id.to_string(),
            events: replay.events.len(),
            created,
            path: self.archive_path(id),
        };
        match self.archive_path(id) {
            Some(path) => match OpenOptions::new().write(true).create_new(true).open(&path) {
                Ok(mut file) => {
                    file.write_all(text.as_bytes())?;
                    file.sync_all()?;
                    Ok(receipt(true))
                }
                Err(e) if e.kind() == io::ErrorKind::AlreadyExists => {
                    if fs::read_to_string(&path)? == text {
                        Ok(receipt(false))
                    } else {
                        Err(StoreError::Conflict(id.to_string()))
                    }
                }
                Err(e) => Err(e.into()),
            },
            None => {
                let mut memory = self.memory.lock().expect("store lock");
                match memory.get(id) {
                    Some(existing) if *existing == text => Ok(receipt(false)),
                    Some(_) => Err(StoreError::Conflict(id.to_string())),
                    None => {
                        memory.insert(id.to_string(), text);
                        Ok(receipt(true))
                    }
                }
            }
        }
    }

    /// The archived replay text, byte for byte.
    pub fn fetch_text(&self, id: &str) -> Result<String, StoreError> {
        let not_found = || StoreError::NotFound(id.to_string());
        if check_id(id).is_err() {
            return Err(not_found());
        }
        match self.archive_path(id) {
            Some(path) => fs::read_to_string(path).map_err(|e| match e.kind() {
                io::ErrorKind::NotFound => not_found(),
                _ => e.into(),
            }),
            None => self
                .memory
                .lock()
                .expect("store lock")
                .get(id)
                .cloned()
                .ok_or_else(not_found),
        }
    }

    pub fn fetch(&self, id: &str) -> Result<ReplayFile, StoreError> {
        Ok(ReplayFile::parse(&self.fetch_text(id)?)?)
    }
}

/// The running log of one session, synced after every append.
#[derive(Debug)]
pub struct LiveLog {
    file: File,
    path: PathBuf,
}

impl LiveLog {
    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&mut self, lines: impl IntoIterator<Item = String>) -> io::Result<()> {
        let mut buf = String::new();
        for line in lines {
            buf.push_str(&line);
            buf.push('\n');
        }
        self.file.write_all(buf.as_bytes())?;
        self.file.sync_data()
    }
}
