use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::card::Card;
use super::dice::{Digit, DigitSet};
use super::RulesError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TicketKind {
    Architecture,
    Feature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CardKind {
    /// "?" cards: resolve immediately against the drawing team.
    Event,
    /// "!" cards: go to the team's hand and are played later.
    Action,
}

/// One of the three columns of a team's system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModuleId {
    A,
    B,
    C,
}

impl ModuleId {
    pub const ALL: [ModuleId; 3] = [ModuleId::A, ModuleId::B, ModuleId::C];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ModuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ModuleId::A => "A",
            ModuleId::B => "B",
            ModuleId::C => "C",
        };
        f.write_str(s)
    }
}

impl FromStr for ModuleId {
    type Err = RulesError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(ModuleId::A),
            "B" | "b" => Ok(ModuleId::B),
            "C" | "c" => Ok(ModuleId::C),
            other => Err(RulesError::UnknownModule(other.to_string())),
        }
    }
}

/// Seat order: team 0 moves first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TeamId(pub u8);

impl TeamId {
    pub const FIRST: TeamId = TeamId(0);
    pub const SECOND: TeamId = TeamId(1);
    pub const BOTH: [TeamId; 2] = [TeamId(0), TeamId(1)];

    pub fn other(self) -> TeamId {
        TeamId(1 - self.0)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for TeamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "team{}", self.0)
    }
}

/// A unit of work on the board.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ticket {
    pub id: String,
    pub kind: TicketKind,
    pub tasks_required: u8,
    pub tasks_done: u8,
    /// Digits printed as crossed out.
    pub blocked: DigitSet,
    /// Red tiles placed during play.
    pub td: DigitSet,
    pub users: u32,
    pub card_trigger: Option<CardKind>,
}

impl Ticket {
    pub fn is_complete(&self) -> bool {
        self.tasks_done >= self.tasks_required
    }

    pub fn remaining(&self) -> u8 {
        self.tasks_required.saturating_sub(self.tasks_done)
    }
}

/// Board slot layout entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotDef {
    pub kind: TicketKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub card: Option<CardKind>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleColumn {
    pub id: ModuleId,
    pub slots: Vec<SlotDef>,
    pub placed: Vec<Ticket>,
    pub in_progress: Option<Ticket>,
}

impl ModuleColumn {
    pub fn new(id: ModuleId, slots: Vec<SlotDef>) -> Self {
        ModuleColumn {
            id,
            slots,
            placed: Vec::new(),
            in_progress: None,
        }
    }

    /// Union of the TD tiles on every placed ticket.
    pub fn placed_td(&self) -> DigitSet {
        self.placed
            .iter()
            .fold(DigitSet::EMPTY, |acc, t| acc.union(t.td))
    }

    pub fn is_complete(&self) -> bool {
        self.in_progress.is_none() && self.placed.len() >= self.slots.len()
    }

    /// Slot the next started ticket would occupy, if any remains.
    pub fn next_slot(&self) -> Option<SlotDef> {
        if self.in_progress.is_some() {
            return None;
        }
        self.slots.get(self.placed.len()).copied()
    }

    pub fn ticket(&self, r: TicketRef) -> Option<&Ticket> {
        match r {
            TicketRef::Placed(i) => self.placed.get(i),
            TicketRef::InProgress => self.in_progress.as_ref(),
        }
    }

    pub fn ticket_mut(&mut self, r: TicketRef) -> Option<&mut Ticket> {
        match r {
            TicketRef::Placed(i) => self.placed.get_mut(i),
            TicketRef::InProgress => self.in_progress.as_mut(),
        }
    }

    /// Every ticket on the column, placed first, with its reference.
    pub fn tickets(&self) -> impl Iterator<Item = (TicketRef, &Ticket)> {
        self.placed
            .iter()
            .enumerate()
            .map(|(i, t)| (TicketRef::Placed(i), t))
            .chain(self.in_progress.iter().map(|t| (TicketRef::InProgress, t)))
    }

    pub fn td_count(&self) -> usize {
        self.tickets().map(|(_, t)| t.td.len()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TicketRef {
    Placed(usize),
    InProgress,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RepaymentTarget {
    pub module: ModuleId,
    pub ticket: TicketRef,
    pub digit: Digit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TeamState {
    pub team: TeamId,
    pub name: String,
    pub board: Vec<ModuleColumn>,
    /// Placed feature users plus card adjustments.
    pub users_banked: i64,
    /// The card-driven part of `users_banked`.
    pub card_adjustments: i64,
    pub hand: Vec<Card>,
    pub skip_turns_pending: u32,
    pub temp_blocked: BTreeMap<Digit, u32>,
    /// Pending "double the users of the next feature" bonuses.
    pub bonus_pending: u32,
    /// Face-down ticket supply; the top is the last element.
    pub architecture_pile: Vec<Ticket>,
    pub feature_pile: Vec<Ticket>,
}

impl TeamState {
    pub fn new(team: TeamId, name: impl Into<String>, board: [Vec<SlotDef>; 3]) -> Self {
        let [a, b, c] = board;
        TeamState {
            team,
            name: name.into(),
            board: vec![
                ModuleColumn::new(ModuleId::A, a),
                ModuleColumn::new(ModuleId::B, b),
                ModuleColumn::new(ModuleId::C, c),
            ],
            users_banked: 0,
            card_adjustments: 0,
            hand: Vec::new(),
            skip_turns_pending: 0,
            temp_blocked: BTreeMap::new(),
            bonus_pending: 0,
            architecture_pile: Vec::new(),
            feature_pile: Vec::new(),
        }
    }

    pub fn module(&self, id: ModuleId) -> &ModuleColumn {
        &self.board[id.index()]
    }

    pub fn module_mut(&mut self, id: ModuleId) -> &mut ModuleColumn {
        &mut self.board[id.index()]
    }

    pub fn temp_blocked_set(&self) -> DigitSet {
        self.temp_blocked
            .iter()
            .filter(|(_, rounds)| **rounds > 0)
            .map(|(d, _)| *d)
            .collect()
    }

    pub fn td_count(&self) -> usize {
        self.board.iter().map(ModuleColumn::td_count).sum()
    }

    pub fn all_modules_complete(&self) -> bool {
        self.board.iter().all(ModuleColumn::is_complete)
    }

    /// Every TD tile on the board as a repayment target, in board order.
    pub fn td_tiles(&self) -> Vec<RepaymentTarget> {
        let mut out = Vec::new();
        for column in &self.board {
            for (r, ticket) in column.tickets() {
                for digit in ticket.td.iter() {
                    out.push(RepaymentTarget {
                        module: column.id,
                        ticket: r,
                        digit,
                    });
                }
            }
        }
        out
    }

    pub fn placed_feature_users(&self) -> i64 {
        self.board
            .iter()
            .flat_map(|c| c.placed.iter())
            .filter(|t| t.kind == TicketKind::Feature)
            .map(|t| i64::from(t.users))
            .sum()
    }

    pub fn completed_tickets(&self) -> usize {
        self.board.iter().map(|c| c.placed.len()).sum()
    }
}

/// Game-length and scoring knobs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RulesConfig {
    pub max_rounds: u32,
    pub td_penalty: u32,
}

impl Default for RulesConfig {
    fn default() -> Self {
        RulesConfig {
            max_rounds: 60,
            td_penalty: 1,
        }
    }
}
