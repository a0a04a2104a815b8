//! The append-only game log.

use serde::{Deserialize, Serialize};

use super::card::EffectPrimitive;
use super::dice::{DiceRoll, Digit};
use super::moves::Move;
use super::types::{CardKind, ModuleId, TeamId, TicketKind, TicketRef};
use crate::aha::AhaTag;

/// One log record. `seq` is the record's index in the log; `round` is the
/// logical round it happened in. There is no wall-clock time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameEvent {
    pub seq: u64,
    pub round: u32,
    pub team: TeamId,
    pub event: EventKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<AhaTag>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RollPurpose {
    Work,
    Repay,
    Card,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndReason {
    RoundLimit,
    ModulesComplete,
}

impl EndReason {
    pub fn describe(self) -> &'static str {
        match self {
            EndReason::RoundLimit => "round limit",
            EndReason::ModulesComplete => "modules complete",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EventKind {
    /// An input: the move a team submitted.
    MoveAccepted {
        #[serde(rename = "move")]
        mv: Move,
    },
    /// An input: the service clock ran out and cut the game at this round.
    ClockExpired {
        max_rounds: u32,
    },
    DiceRolled {
        roll: DiceRoll,
        purpose: RollPurpose,
    },
    TaskCompleted {
        module: ModuleId,
        ticket_id: String,
        count: u8,
        tasks_done: u8,
    },
    NoProgress {
        module: ModuleId,
        ticket_id: String,
    },
    TdIncurred {
        module: ModuleId,
        ticket: TicketRef,
        ticket_id: String,
        digit: Digit,
        conscious: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        card_id: Option<String>,
    },
    TdRepaid {
        module: ModuleId,
        ticket: TicketRef,
        ticket_id: String,
        digit: Digit,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        card_id: Option<String>,
    },
    RepaymentFailed {
        module: ModuleId,
        ticket: TicketRef,
        ticket_id: String,
        digit: Digit,
    },
    TicketStarted {
        module: ModuleId,
        ticket_id: String,
        kind: TicketKind,
        slot: usize,
    },
    TicketCompleted {
        module: ModuleId,
        ticket_id: String,
        kind: TicketKind,
        users: u32,
    },
    CardDrawn {
        card_id: String,
        kind: CardKind,
    },
    CardPlayed {
        card_id: String,
    },
    DeckReshuffled {
        kind: CardKind,
        size: usize,
    },
    /// Both the deck and its discard pile were empty.
    DrawSkipped {
        kind: CardKind,
    },
    EffectApplied {
        card_id: String,
        effect: EffectPrimitive,
        applied: bool,
        #[serde(default, skip_serializing_if = "String::is_empty")]
        detail: String,
    },
    UsersAdjusted {
        card_id: String,
        amount: i64,
    },
    TurnSkipped,
    ScoreTallied {
        users: i64,
        unrepaid_td: u32,
        score: i64,
    },
    GameEnded {
        reason: EndReason,
        winner: Option<TeamId>,
    },
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::MoveAccepted { .. } => "move_accepted",
            EventKind::ClockExpired { .. } => "clock_expired",
            EventKind::DiceRolled { .. } => "dice_rolled",
            EventKind::TaskCompleted { .. } => "task_completed",
            EventKind::NoProgress { .. } => "no_progress",
            EventKind::TdIncurred { .. } => "td_incurred",
            EventKind::TdRepaid { .. } => "td_repaid",
            EventKind::RepaymentFailed { .. } => "repayment_failed",
            EventKind::TicketStarted { .. } => "ticket_started",
            EventKind::TicketCompleted { .. } => "ticket_completed",
            EventKind::CardDrawn { .. } => "card_drawn",
            EventKind::CardPlayed { .. } => "card_played",
            EventKind::DeckReshuffled { .. } => "deck_reshuffled",
            EventKind::DrawSkipped { .. } => "draw_skipped",
            EventKind::EffectApplied { .. } => "effect_applied",
            EventKind::UsersAdjusted { .. } => "users_adjusted",
            EventKind::TurnSkipped => "turn_skipped",
            EventKind::ScoreTallied { .. } => "score_tallied",
            EventKind::GameEnded { .. } => "game_ended",
        }
    }

    /// Inputs are what a replay re-submits; everything else is derived.
    pub fn is_input(&self) -> bool {
        matches!(
            self,
            EventKind::MoveAccepted { .. } | EventKind::ClockExpired { .. }
        )
    }
}
