//! Replay files: a header line followed by one JSON object per game event.
//!
//! The byte layout is documented in `docs/replay-format.md`. Serialization is
//! canonical (compact JSON, struct field order, `\n` after every line), so
//! write → read → write is byte-identical.

use std::fs;
use std::io;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{SessionConfig, SessionError, TeamRoster};
use crate::content::ContentPack;
use crate::rules::{EventKind, GameEvent, GameState, Rejection};

pub const REPLAY_FORMAT: &str = "techdebt-replay";
pub const REPLAY_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayHeader {
    pub format: String,
    pub format_version: u32,
    pub pack_name: String,
    pub pack_version: String,
    pub seed: u64,
    pub max_rounds: u32,
    pub td_penalty: u32,
    pub teams: Vec<TeamRoster>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayFile {
    pub header: ReplayHeader,
    pub events: Vec<GameEvent>,
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported replay format '{format}' version {version}")]
    Format { format: String, version: u32 },
    #[error("replay needs pack {expected}, got {found}")]
    PackMismatch { expected: String, found: String },
    #[error("replay header: {0}")]
    Config(#[from] SessionError),
    #[error("replay diverges at event {index}: expected {expected}, engine produced {found}")]
    Divergence {
        index: usize,
        expected: String,
        found: String,
    },
    #[error("replay input at event {index} rejected: {rejection}")]
    Rejected { index: usize, rejection: Rejection },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl ReplayFile {
    /// Capture a game's header and full log.
    pub fn record(config: &SessionConfig, state: &GameState) -> Self {
        // max_rounds comes from the config: a clock expiry is an input in the log.
        let rules = config.rules();
        ReplayFile {
            header: ReplayHeader {
                format: REPLAY_FORMAT.to_string(),
                format_version: REPLAY_FORMAT_VERSION,
                pack_name: config.pack.name.clone(),
                pack_version: config.pack.version.clone(),
                seed: config.seed,
                max_rounds: rules.max_rounds,
                td_penalty: rules.td_penalty,
                teams: config.teams.clone(),
            },
            events: state.log().to_vec(),
        }
    }

    pub fn header_line(&self) -> String {
        serde_json::to_string(&self.header).expect("header serializes")
    }

    pub fn event_line(event: &GameEvent) -> String {
        serde_json::to_string(event).expect("event serializes")
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = self.header_line();
        out.push('\n');
        for event in &self.events {
            out.push_str(&Self::event_line(event));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, ReplayError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or(ReplayError::Parse {
            line: 1,
            message: "empty replay file".to_string(),
        })?;
        let header: ReplayHeader = serde_json::from_str(first).map_err(|e| ReplayError::Parse {
            line: 1,
            message: e.to_string(),
        })?;
        if header.format != REPLAY_FORMAT || header.format_version != REPLAY_FORMAT_VERSION {
            return Err(ReplayError::Format {
                format: header.format,
                version: header.format_version,
            });
        }
        let events = lines
            .map(|(i, line)| {
                serde_json::from_str(line).map_err(|e| ReplayError::Parse {
                    line: i + 1,
                    message: e.to_string(),
                })
            })
            .collect::<Result<Vec<GameEvent>, _>>()?;
        Ok(ReplayFile { header, events })
    }

    pub fn write_to(&self, path: &Path) -> Result<(), ReplayError> {
        fs::write(path, self.to_jsonl())?;
        Ok(())
    }

    pub fn read_from(path: &Path) -> Result<Self, ReplayError> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// The session configuration the header describes, against `pack`.
    pub fn config(&self, pack: Arc<ContentPack>) -> Result<SessionConfig, ReplayError> {
        if pack.name != self.header.pack_name || pack.version != self.header.pack_version {
            return Err(ReplayError::PackMismatch {
                expected: format!("{}@{}", self.header.pack_name, self.header.pack_version),
                found: format!("{}@{}", pack.name, pack.version),
            });
        }
        let config = SessionConfig {
            pack,
            seed: self.header.seed,
            max_rounds: self.header.max_rounds,
            td_penalty: self.header.td_penalty,
            teams: self.header.teams.clone(),
        };
        config.validate()?;
        Ok(config)
    }

    /// The recorded inputs in order.
    pub fn inputs(&self) -> impl Iterator<Item = &GameEvent> {
        self.events.iter().filter(|e| e.event.is_input())
    }
}

fn describe(event: Option<&GameEvent>) -> String {
    match event {
        Some(e) => ReplayFile::event_line(e),
        None => "end of log".to_string(),
    }
}

/// Re-run a recorded game from its header and inputs, checking every event
/// the engine produces against the file.
pub fn replay(file: &ReplayFile, pack: Arc<ContentPack>) -> Result<GameState, ReplayError> {
    let config = file.config(pack)?;
    let mut state = super::new_session(&config)?;
    let expected = &file.events;

    let check = |state: &GameState, from: usize| -> Result<(), ReplayError> {
        let log = state.log();
        for i in from..log.len() {
            if expected.get(i) != Some(&log[i]) {
                return Err(ReplayError::Divergence {
                    index: i,
                    expected: describe(expected.get(i)),
                    found: describe(log.get(i)),
                });
            }
        }
        Ok(())
    };
    check(&state, 0)?;

    while state.log().len() < expected.len() {
        let index = state.log().len();
        let input = &expected[index];
        match &input.event {
            EventKind::MoveAccepted { mv } => {
                state
                    .submit_move(input.team, mv)
                    .map_err(|rejection| ReplayError::Rejected { index, rejection })?;
            }
            EventKind::ClockExpired { .. } => state.expire_clock(),
            _ => {
                return Err(ReplayError::Divergence {
                    index,
                    expected: describe(Some(input)),
                    found: "no event (engine was waiting for an input)".to_string(),
                })
            }
        }
        check(&state, index)?;
    }
    Ok(state)
}
