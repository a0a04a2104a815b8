//! Network-facing host for live TechDebt games, plus the `techdebt`
//! command-line front end.
//!
//! [`SessionHost`] owns the sessions; [`http::router`] exposes it over HTTP
//! with a server-sent-events stream; [`store::GameStore`] keeps the
//! append-only game logs. Message bodies are JSON, and every body carries
//! `"protocol": 1`.

pub mod cli;
mod error;
pub mod host;
pub mod http;
pub mod store;
pub mod view;

pub use error::{ErrorBody, ErrorDetail, ServiceError};
pub use host::{
    Accepted, CreateSession, Created, Joined, Push, PushKind, SeatToken, SessionHost,
    StreamItem, Subscription, DEFAULT_CLOCK,
};
pub use store::{ArchiveReceipt, GameStore};
pub use view::{ClientView, SeatRef, SessionStatus};

/// Version of the JSON wire schema.
pub const PROTOCOL_VERSION: u32 = 1;
