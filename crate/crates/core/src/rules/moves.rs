use std::fmt;

use serde::{Deserialize, Serialize};

use super::card::Bindings;
use super::dice::Digit;
use super::types::{ModuleId, RepaymentTarget};

/// A single turn's decision.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Move {
    /// Roll both dice against the module's in-progress ticket.
    ///
    /// `incur` is a conditional priority list: if every rolled digit is
    /// blocked, the first listed digit that was rolled takes a TD tile and
    /// one task completes.
    Work {
        module: ModuleId,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        incur: Vec<Digit>,
    },
    Repay {
        target: RepaymentTarget,
    },
    PlayAction {
        card_id: String,
        #[serde(default, skip_serializing_if = "Bindings::is_empty")]
        bindings: Bindings,
    },
    StartTicket {
        module: ModuleId,
    },
}

/// The four move classes, used for coverage accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveClass {
    Work,
    Repay,
    PlayAction,
    StartTicket,
}

impl Move {
    pub fn work(module: ModuleId) -> Move {
        Move::Work {
            module,
            incur: Vec::new(),
        }
    }

    pub fn class(&self) -> MoveClass {
        match self {
            Move::Work { .. } => MoveClass::Work,
            Move::Repay { .. } => MoveClass::Repay,
            Move::PlayAction { .. } => MoveClass::PlayAction,
            Move::StartTicket { .. } => MoveClass::StartTicket,
        }
    }

    /// True when both moves are the same option from the legal list,
    /// ignoring the free parameters (incur choices, bindings).
    pub fn same_option(&self, other: &Move) -> bool {
        match (self, other) {
            (Move::Work { module: a, .. }, Move::Work { module: b, .. }) => a == b,
            (Move::Repay { target: a }, Move::Repay { target: b }) => a == b,
            (Move::PlayAction { card_id: a, .. }, Move::PlayAction { card_id: b, .. }) => a == b,
            (Move::StartTicket { module: a }, Move::StartTicket { module: b }) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Work { module, incur } if incur.is_empty() => write!(f, "work {module}"),
            Move::Work { module, incur } => {
                let list: Vec<String> = incur.iter().map(Digit::to_string).collect();
                write!(f, "work {module} incur [{}]", list.join(","))
            }
            Move::Repay { target } => write!(
                f,
                "repay {} {:?} digit {}",
                target.module, target.ticket, target.digit
            ),
            Move::PlayAction { card_id, .. } => write!(f, "play {card_id}"),
            Move::StartTicket { module } => write!(f, "start {module}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::types::TicketRef;

    #[test]
    fn wire_form_is_tagged() {
        let m = Move::Work {
            module: ModuleId::B,
            incur: vec![Digit::new(5).unwrap()],
        };
        assert_eq!(
            serde_json::to_string(&m).unwrap(),
            r#"{"type":"work","module":"B","incur":[5]}"#
        );
        let plain: Move = serde_json::from_str(r#"{"type":"work","module":"A"}"#).unwrap();
        assert_eq!(plain, Move::work(ModuleId::A));
        let repay: Move = serde_json::from_str(
            r#"{"type":"repay","target":{"module":"C","ticket":{"placed":1},"digit":3}}"#,
        )
        .unwrap();
        assert_eq!(
            repay,
            Move::Repay {
                target: RepaymentTarget {
                    module: ModuleId::C,
                    ticket: TicketRef::Placed(1),
                    digit: Digit::new(3).unwrap()
                }
            }
        );
    }

    #[test]
    fn same_option_ignores_free_parameters() {
        let a = Move::work(ModuleId::A);
        let b = Move::Work {
            module: ModuleId::A,
            incur: vec![Digit::new(1).unwrap()],
        };
        assert!(a.same_option(&b));
        assert!(!a.same_option(&Move::work(ModuleId::B)));
    }
}
