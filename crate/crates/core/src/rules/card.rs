use serde::{Deserialize, Serialize};

use super::dice::Digit;
use super::types::{CardKind, ModuleId, TicketRef};
use crate::aha::AhaTag;

/// Which of the acting team's tickets a primitive touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TicketSelector {
    /// Most recently placed ticket across all modules (highest row, module order on ties).
    NewestPlaced,
    /// First placed ticket of the first started module, usually an architecture ticket.
    OldestPlaced,
    /// First in-progress ticket in module order.
    InProgress,
    /// Uniformly among all tickets on the board.
    Random,
    /// Supplied by the player through [`Bindings`].
    Chosen,
}

/// The closed effect vocabulary cards are written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum EffectPrimitive {
    AddTdRandomDigit { target: TicketSelector },
    /// Binding: module, optional ticket (defaults to in-progress), digit.
    AddTdChosenDigit,
    RemoveTd { target: TicketSelector },
    /// Binding: a full repayment target. Rolls the dice once.
    FreeRepaymentAttempt,
    SkipNextTurn,
    CompleteOneTask { target: TicketSelector },
    BlockDigitForRounds { digit: Digit, rounds: u32 },
    RevealOpponentTd,
    DoubleNextTicketUsers,
}

impl EffectPrimitive {
    pub fn needs_binding(&self) -> bool {
        matches!(
            self,
            EffectPrimitive::AddTdChosenDigit
                | EffectPrimitive::FreeRepaymentAttempt
                | EffectPrimitive::AddTdRandomDigit {
                    target: TicketSelector::Chosen
                }
                | EffectPrimitive::RemoveTd {
                    target: TicketSelector::Chosen
                }
                | EffectPrimitive::CompleteOneTask {
                    target: TicketSelector::Chosen
                }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Card {
    pub id: String,
    pub kind: CardKind,
    pub title: String,
    pub narrative: String,
    pub effect: Vec<EffectPrimitive>,
    pub aha: Vec<AhaTag>,
    /// Playing the card does not end the turn.
    #[serde(default)]
    pub free_action: bool,
}

impl Card {
    pub fn needs_binding(&self) -> bool {
        self.effect.iter().any(EffectPrimitive::needs_binding)
    }
}

/// Player choices attached to a played action card.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bindings {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module: Option<ModuleId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ticket: Option<TicketRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub digit: Option<Digit>,
}

impl Bindings {
    pub fn is_empty(&self) -> bool {
        self.module.is_none() && self.ticket.is_none() && self.digit.is_none()
    }

    pub fn ticket_ref(&self) -> TicketRef {
        self.ticket.unwrap_or(TicketRef::InProgress)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn effect_wire_form() {
        let e = EffectPrimitive::AddTdRandomDigit {
            target: TicketSelector::NewestPlaced,
        };
        assert_eq!(
            serde_json::to_string(&e).unwrap(),
            r#"{"op":"add_td_random_digit","target":"newest_placed"}"#
        );
        let b: EffectPrimitive =
            serde_json::from_str(r#"{"op":"block_digit_for_rounds","digit":6,"rounds":2}"#).unwrap();
        assert_eq!(
            b,
            EffectPrimitive::BlockDigitForRounds {
                digit: Digit::new(6).unwrap(),
                rounds: 2
            }
        );
        assert!(serde_json::from_str::<EffectPrimitive>(r#"{"op":"block_digit_for_rounds","digit":7,"rounds":2}"#).is_err());
    }

    #[test]
    fn binding_requirements() {
        assert!(EffectPrimitive::FreeRepaymentAttempt.needs_binding());
        assert!(EffectPrimitive::AddTdChosenDigit.needs_binding());
        assert!(EffectPrimitive::RemoveTd {
            target: TicketSelector::Chosen
        }
        .needs_binding());
        assert!(!EffectPrimitive::RemoveTd {
            target: TicketSelector::Random
        }
        .needs_binding());
        assert!(!EffectPrimitive::SkipNextTurn.needs_binding());
    }
}
