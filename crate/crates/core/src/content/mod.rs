//! Game content: ticket designs, card decks, board layout.
//!
//! Packs are TOML documents (see `docs/content-pack.md`). [`load_pack`]
//! parses and validates in one step; a pack that loads is safe to play.

mod coverage;
mod pack;

use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

pub use coverage::{coverage_report, CoverageReport, CoverageRow};
pub use pack::{load_pack, ContentPack, TicketTemplate, MAX_EFFECTS, MAX_TASKS, PACK_VERSION};

/// Source text of the shipped default pack.
pub const DEFAULT_PACK_TOML: &str = include_str!("../../packs/default.toml");

/// One invariant violation, located by a dotted path into the document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PackError {
    #[error("pack does not parse: {0}")]
    Parse(String),
    #[error("pack has {} validation error(s): {}", .0.len(), join(.0))]
    Invalid(Vec<ValidationError>),
}

impl PackError {
    pub fn errors(&self) -> &[ValidationError] {
        match self {
            PackError::Parse(_) => &[],
            PackError::Invalid(errors) => errors,
        }
    }
}

fn join(errors: &[ValidationError]) -> String {
    errors
        .iter()
        .map(ValidationError::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// The shipped default pack, loaded once.
pub fn default_pack() -> Arc<ContentPack> {
    static PACK: OnceLock<Arc<ContentPack>> = OnceLock::new();
    PACK.get_or_init(|| Arc::new(load_pack(DEFAULT_PACK_TOML).expect("default pack is valid")))
        .clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{CardKind, TicketKind};

    #[test]
    fn default_pack_loads() {
        let pack = default_pack();
        assert_eq!(pack.pack_version, PACK_VERSION);
        for slots in &pack.board {
            assert_eq!(slots.len(), 4);
            assert_eq!(slots[0].kind, TicketKind::Architecture);
        }
        assert!(pack.event_cards.len() >= 18);
        assert!(pack.action_cards.len() >= 10);
        assert!(pack.event_cards.iter().all(|c| c.kind == CardKind::Event));
        assert!(pack.action_cards.iter().all(|c| c.kind == CardKind::Action));
    }

    #[test]
    fn developer_retires_is_in_the_deck() {
        let card = default_pack().card("developer-retires").cloned().unwrap();
        assert_eq!(card.kind, CardKind::Event);
        assert!(card.aha.iter().any(|t| t.to_string() == "Causes/Personnel"));
    }

    #[test]
    fn serialize_then_reload_is_identity() {
        let pack = default_pack();
        let text = pack.to_toml();
        let again = load_pack(&text).unwrap();
        assert_eq!(*pack, again);
    }

    fn minimal() -> String {
        r#"
pack_version = 1
name = "mini"
version = "0.1"

[defaults]
td_penalty = 1
max_rounds = 10

[board]
A = [{ kind = "architecture" }, { kind = "feature", card = "event" }]
B = [{ kind = "architecture" }]
C = [{ kind = "architecture" }]

[[tickets]]
id = "arch"
kind = "architecture"
tasks = 2
blocked = [1]

[[tickets]]
id = "feat"
kind = "feature"
tasks = 2
blocked = [2, 3]
users = 4
"#
        .to_string()
    }

    fn messages(src: &str) -> Vec<String> {
        match load_pack(src) {
            Ok(_) => Vec::new(),
            Err(e) => e.errors().iter().map(ToString::to_string).collect(),
        }
    }

    #[test]
    fn minimal_pack_loads() {
        let pack = load_pack(&minimal()).unwrap();
        assert_eq!(pack.tickets.len(), 2);
        assert!(pack.event_cards.is_empty());
    }

    #[test]
    fn all_six_blocked_is_unworkable() {
        let src = minimal().replace("blocked = [2, 3]", "blocked = [1, 2, 3, 4, 5, 6]");
        let errs = messages(&src);
        assert_eq!(errs.len(), 1, "{errs:?}");
        assert!(errs[0].starts_with("tickets[1].blocked: unworkable ticket"), "{errs:?}");
    }

    #[test]
    fn unknown_aha_variable_is_rejected() {
        let src = minimal()
            + r#"
[[event_cards]]
id = "storm"
title = "Storm"
aha = ["Causes/Weather"]
effect = [{ op = "skip_next_turn" }]
"#;
        let errs = messages(&src);
        assert_eq!(errs, vec!["event_cards[0].aha[0]: unknown aha variable 'Weather' in group Causes"]);
    }

    #[test]
    fn event_cards_cannot_ask_for_choices() {
        let src = minimal()
            + r#"
[[event_cards]]
id = "x"
title = "X"
aha = ["Causes/Time"]
effect = [{ op = "free_repayment_attempt" }]
"#;
        assert!(messages(&src)[0].starts_with("event_cards[0].effect[0]"));
    }

    #[test]
    fn parse_failure_is_distinct() {
        assert!(matches!(load_pack("pack_version = "), Err(PackError::Parse(_))));
        assert!(matches!(
            load_pack(&(minimal() + "\nsurprise = 1\n")),
            Err(PackError::Parse(_))
        ));
    }
}
