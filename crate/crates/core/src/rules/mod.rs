//! Pure, deterministic game logic.
//!
//! Nothing in here touches the clock, the filesystem or the network. Every
//! random choice flows through a [`Dice`] implementation, normally the
//! [`GameRng`] stored in the [`GameState`].

pub mod card;
pub mod dice;
pub mod event;
pub mod legal;
pub mod moves;
mod resolve;
pub mod state;
pub mod types;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use card::{Bindings, Card, EffectPrimitive, TicketSelector};
pub use dice::{Dice, DiceRoll, Digit, DigitSet, GameRng, ScriptedDice};
pub use event::{EndReason, EventKind, GameEvent, RollPurpose};
pub use legal::{auto_bind, legal_moves, validate_move};
pub use moves::{Move, MoveClass};
pub use resolve::{effective_blocked, repay_succeeds, resolve_work, WorkOutcome};
pub use state::{GameState, Phase, Scores};
pub use types::{
    CardKind, ModuleColumn, ModuleId, RepaymentTarget, RulesConfig, SlotDef, TeamId, TeamState,
    Ticket, TicketKind, TicketRef,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RulesError {
    #[error("digit {0} outside 1..=6")]
    DigitOutOfRange(u8),
    #[error("unknown module '{0}'")]
    UnknownModule(String),
    #[error("game over")]
    GameOver,
    #[error("game is not finished")]
    NotFinished,
    #[error("nothing to work on in module {0}")]
    NothingToWorkOn(ModuleId),
    #[error("illegal incur: digit {0} is not blocked for this ticket or already carries TD")]
    IllegalIncur(Digit),
    #[error("nothing to repay")]
    NothingToRepay,
    #[error("ticket in module {0} is not complete")]
    TicketIncomplete(ModuleId),
    #[error("module {0} has no free slot")]
    NoFreeSlot(ModuleId),
    #[error("card '{0}' is not in hand")]
    CardNotInHand(String),
    #[error("content has no {0:?} ticket templates")]
    NoTicketTemplates(TicketKind),
}

/// Machine-readable reason a submitted move was refused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectCode {
    NotYourTurn,
    GameOver,
    IllegalMove,
    IllegalIncur,
    NothingToRepay,
    BindingRequired,
    InvalidBinding,
    UnknownCard,
}

impl RejectCode {
    pub fn as_str(self) -> &'static str {
        match self {
            RejectCode::NotYourTurn => "not_your_turn",
            RejectCode::GameOver => "game_over",
            RejectCode::IllegalMove => "illegal_move",
            RejectCode::IllegalIncur => "illegal_incur",
            RejectCode::NothingToRepay => "nothing_to_repay",
            RejectCode::BindingRequired => "binding_required",
            RejectCode::InvalidBinding => "invalid_binding",
            RejectCode::UnknownCard => "unknown_card",
        }
    }
}

/// A refused move. The state is untouched whenever one of these is returned.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Error)]
pub struct Rejection {
    pub code: RejectCode,
    pub message: String,
}

impl Rejection {
    pub fn new(code: RejectCode, message: impl Into<String>) -> Self {
        Rejection {
            code,
            message: message.into(),
        }
    }
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code.as_str(), self.message)
    }
}
