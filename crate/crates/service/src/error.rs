use serde::Serialize;
use thiserror::Error;

use techdebt_core::rules::{RejectCode, Rejection};

use crate::store::StoreError;

/// Everything a session host call can refuse with. Each variant has a stable
/// wire code; rule rejections keep the engine's own codes.
#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("no session with id '{0}'")]
    UnknownSession(String),
    #[error("no content pack named '{0}'")]
    UnknownPack(String),
    #[error("invalid session config: {0}")]
    InvalidConfig(String),
    #[error("token does not belong to this session")]
    BadToken,
    #[error("every seat of this session is taken")]
    SessionFull,
    #[error("seat has not joined yet")]
    NotJoined,
    #[error("session is still waiting for players")]
    NotStarted,
    #[error("your seat plays for team {seat_team}, not team {claimed}")]
    NotYourSeatsTeam { seat_team: u8, claimed: u8 },
    #[error("{0}")]
    Rejected(Rejection),
    #[error("malformed request: {0}")]
    BadRequest(String),
    #[error("sequence number {since} is ahead of the session ({current})")]
    BadSequence { since: u64, current: u64 },
    #[error("session has not finished")]
    NotFinished,
    #[error("no archived game with id '{0}'")]
    NotFound(String),
    #[error("storage: {0}")]
    Storage(#[from] StoreError),
}

impl ServiceError {
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::UnknownSession(_) => "unknown_session",
            ServiceError::UnknownPack(_) => "unknown_pack",
            ServiceError::InvalidConfig(_) => "invalid_config",
            ServiceError::BadToken => "bad_token",
            ServiceError::SessionFull => "session_full",
            ServiceError::NotJoined => "not_joined",
            ServiceError::NotStarted => "not_started",
            ServiceError::NotYourSeatsTeam { .. } => "not_your_seats_team",
            ServiceError::Rejected(r) => r.code.as_str(),
            ServiceError::BadRequest(_) => "bad_request",
            ServiceError::BadSequence { .. } => "bad_sequence",
            ServiceError::NotFinished => "not_finished",
            ServiceError::NotFound(_) => "not_found",
            ServiceError::Storage(StoreError::NotFound(_)) => "not_found",
            ServiceError::Storage(_) => "storage",
        }
    }

    /// The engine's reason code when this is a rule rejection.
    pub fn reject_code(&self) -> Option<RejectCode> {
        match self {
            ServiceError::Rejected(r) => Some(r.code),
            _ => None,
        }
    }

    pub fn body(&self) -> ErrorBody {
        ErrorBody {
            protocol: crate::PROTOCOL_VERSION,
            error: ErrorDetail {
                code: self.code().to_string(),
                message: self.to_string(),
            },
        }
    }
}

impl From<Rejection> for ServiceError {
    fn from(r: Rejection) -> Self {
        ServiceError::Rejected(r)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct ErrorBody {
    pub protocol: u32,
    pub error: ErrorDetail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct ErrorDetail {
    pub code: String,
    pub message: String,
}
