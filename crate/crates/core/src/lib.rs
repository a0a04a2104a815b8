//! Rules engine, content packs, replays and strategy simulation for TechDebt,
//! a two-team board game about incurring and repaying technical debt.
//!
//! Start with [`session::new_session`] and [`rules::GameState::submit_move`];
//! `examples/` has one runnable program per capability.

pub mod aha;
pub mod content;
pub mod rules;
pub mod session;
pub mod sim;

pub use aha::{AhaGroup, AhaTag};
pub use content::{default_pack, load_pack, ContentPack, PackError};
pub use rules::{GameEvent, GameState, Move, Rejection, TeamId};
pub use session::{new_session, replay, ReplayFile, SessionConfig};
