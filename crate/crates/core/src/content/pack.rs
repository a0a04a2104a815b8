use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{PackError, ValidationError};
use crate::aha::AhaTag;
use crate::rules::{
    Card, CardKind, DigitSet, EffectPrimitive, RulesConfig, SlotDef, Ticket, TicketKind,
};

/// Newest content format this build reads.
pub const PACK_VERSION: u32 = 1;

pub const MAX_TASKS: u8 = 8;
pub const MAX_EFFECTS: usize = 3;

/// A printed ticket design. Games draw instances of these.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TicketTemplate {
    pub id: String,
    pub kind: TicketKind,
    pub tasks: u8,
    pub blocked: DigitSet,
    pub users: u32,
}

impl TicketTemplate {
    pub fn instantiate(&self) -> Ticket {
        Ticket {
            id: self.id.clone(),
            kind: self.kind,
            tasks_required: self.tasks,
            tasks_done: 0,
            blocked: self.blocked,
            td: DigitSet::EMPTY,
            users: if self.kind == TicketKind::Architecture { 0 } else { self.users },
            card_trigger: None,
        }
    }
}

/// Validated game content. Read-only once loaded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContentPack {
    pub pack_version: u32,
    pub name: String,
    pub version: String,
    pub defaults: RulesConfig,
    /// Slot layout for modules A, B, C.
    pub board: [Vec<SlotDef>; 3],
    pub tickets: Vec<TicketTemplate>,
    pub event_cards: Vec<Card>,
    pub action_cards: Vec<Card>,
}

impl ContentPack {
    pub fn instantiate(&self, kind: TicketKind) -> Vec<Ticket> {
        self.tickets
            .iter()
            .filter(|t| t.kind == kind)
            .map(TicketTemplate::instantiate)
            .collect()
    }

    pub fn cards(&self) -> impl Iterator<Item = &Card> {
        self.event_cards.iter().chain(self.action_cards.iter())
    }

    pub fn card(&self, id: &str) -> Option<&Card> {
        self.cards().find(|c| c.id == id)
    }

    /// Serialize back to the TOML document form.
    pub fn to_toml(&self) -> String {
        toml::to_string(&PackDocument::from(self)).expect("pack document always serializes")
    }
}

// The on-disk document is deliberately loose (plain integers and strings)
// so that every invariant violation is reported by the validator with a
// path, not by the TOML parser.

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct PackDocument {
    pack_version: i64,
    name: String,
    version: String,
    defaults: DefaultsDoc,
    board: BoardDoc,
    #[serde(default)]
    tickets: Vec<TicketDoc>,
    #[serde(default)]
    event_cards: Vec<CardDoc>,
    #[serde(default)]
    action_cards: Vec<CardDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DefaultsDoc {
    td_penalty: i64,
    max_rounds: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoardDoc {
    #[serde(rename = "A")]
    a: Vec<SlotDoc>,
    #[serde(rename = "B")]
    b: Vec<SlotDoc>,
    #[serde(rename = "C")]
    c: Vec<SlotDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SlotDoc {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    card: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TicketDoc {
    id: String,
    kind: String,
    tasks: i64,
    #[serde(default)]
    blocked: Vec<i64>,
    #[serde(default)]
    users: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CardDoc {
    id: String,
    title: String,
    #[serde(default)]
    narrative: String,
    #[serde(default)]
    aha: Vec<String>,
    #[serde(default)]
    effect: Vec<toml::Value>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    free_action: bool,
}

fn kind_name(kind: TicketKind) -> &'static str {
    match kind {
        TicketKind::Architecture => "architecture",
        TicketKind::Feature => "feature",
    }
}

fn card_kind_name(kind: CardKind) -> &'static str {
    match kind {
        CardKind::Event => "event",
        CardKind::Action => "action",
    }
}

impl From<&ContentPack> for PackDocument {
    fn from(p: &ContentPack) -> Self {
        let slots = |s: &Vec<SlotDef>| {
            s.iter()
                .map(|slot| SlotDoc {
                    kind: kind_name(slot.kind).to_string(),
                    card: slot.card.map(|c| card_kind_name(c).to_string()),
                })
                .collect()
        };
        let card = |c: &Card| CardDoc {
            id: c.id.clone(),
            title: c.title.clone(),
            narrative: c.narrative.clone(),
            aha: c.aha.iter().map(AhaTag::to_string).collect(),
            effect: c
                .effect
                .iter()
                .map(|e| toml::Value::try_from(e).expect("effect serializes"))
                .collect(),
            free_action: c.free_action,
        };
        PackDocument {
            pack_version: i64::from(p.pack_version),
            name: p.name.clone(),
            version: p.version.clone(),
            defaults: DefaultsDoc {
                td_penalty: i64::from(p.defaults.td_penalty),
                max_rounds: i64::from(p.defaults.max_rounds),
            },
            board: BoardDoc {
                a: slots(&p.board[0]),
                b: slots(&p.board[1]),
                c: slots(&p.board[2]),
            },
            tickets: p
                .tickets
                .iter()
                .map(|t| TicketDoc {
                    id: t.id.clone(),
                    kind: kind_name(t.kind).to_string(),
                    tasks: i64::from(t.tasks),
                    blocked: t.blocked.iter().map(|d| i64::from(d.value())).collect(),
                    users: i64::from(t.users),
                })
                .collect(),
            event_cards: p.event_cards.iter().map(card).collect(),
            action_cards: p.action_cards.iter().map(card).collect(),
        }
    }
}

/// Parse and validate a pack document. All invariant violations are
/// collected and reported together.
pub fn load_pack(source: &str) -> Result<ContentPack, PackError> {
    let doc: PackDocument = toml::from_str(source).map_err(|e| PackError::Parse(e.to_string()))?;
    let mut v = Validator::default();
    let pack = v.pack(doc);
    if v.errors.is_empty() {
        Ok(pack)
    } else {
        Err(PackError::Invalid(v.errors))
    }
}

#[derive(Default)]
struct Validator {
    errors: Vec<ValidationError>,
}

impl Validator {
    fn err(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.errors.push(ValidationError {
            path: path.into(),
            message: message.into(),
        });
    }

    fn int<T: TryFrom<i64>>(&mut self, path: &str, value: i64, what: &str) -> Option<T> {
        match T::try_from(value) {
            Ok(v) => Some(v),
            Err(_) => {
                self.err(path, format!("{what} out of range: {value}"));
                None
            }
        }
    }

    fn pack(&mut self, doc: PackDocument) -> ContentPack {
        if doc.pack_version != i64::from(PACK_VERSION) {
            self.err(
                "pack_version",
                format!("unsupported pack_version {} (expected {PACK_VERSION})", doc.pack_version),
            );
        }
        if doc.name.trim().is_empty() {
            self.err("name", "pack name must not be empty");
        }
        let td_penalty = self
            .int::<u32>("defaults.td_penalty", doc.defaults.td_penalty, "td_penalty")
            .unwrap_or(0);
        let max_rounds = self
            .int::<u32>("defaults.max_rounds", doc.defaults.max_rounds, "max_rounds")
            .unwrap_or(1);
        if max_rounds == 0 {
            self.err("defaults.max_rounds", "max_rounds must be at least 1");
        }

        let board = [
            self.slots("board.A", &doc.board.a),
            self.slots("board.B", &doc.board.b),
            self.slots("board.C", &doc.board.c),
        ];

        let mut ids = HashSet::new();
        let tickets: Vec<TicketTemplate> = doc
            .tickets
            .iter()
            .enumerate()
            .filter_map(|(i, t)| self.ticket(&format!("tickets[{i}]"), t, &mut ids))
            .collect();
        // Checked on the declared kinds so one bad ticket is reported once.
        for kind in [TicketKind::Architecture, TicketKind::Feature] {
            if !doc.tickets.iter().any(|t| t.kind == kind_name(kind)) {
                self.err("tickets", format!("no {} ticket templates", kind_name(kind)));
            }
        }

        let mut card_ids = HashSet::new();
        let event_cards = doc
            .event_cards
            .iter()
            .enumerate()
            .filter_map(|(i, c)| self.card(&format!("event_cards[{i}]"), c, CardKind::Event, &mut card_ids))
            .collect();
        let action_cards = doc
            .action_cards
            .iter()
            .enumerate()
            .filter_map(|(i, c)| self.card(&format!("action_cards[{i}]"), c, CardKind::Action, &mut card_ids))
            .collect();

        ContentPack {
            pack_version: PACK_VERSION,
            name: doc.name,
            version: doc.version,
            defaults: RulesConfig {
                max_rounds,
                td_penalty,
            },
            board,
            tickets,
            event_cards,
            action_cards,
        }
    }

    fn slots(&mut self, path: &str, slots: &[SlotDoc]) -> Vec<SlotDef> {
        if slots.is_empty() {
            self.err(path, "module needs at least one slot");
        }
        let mut out = Vec::new();
        for (i, s) in slots.iter().enumerate() {
            let p = format!("{path}[{i}]");
            let kind = match s.kind.as_str() {
                "architecture" => TicketKind::Architecture,
                "feature" => TicketKind::Feature,
                other => {
                    self.err(format!("{p}.kind"), format!("unknown ticket kind '{other}'"));
                    continue;
                }
            };
            if i == 0 && kind != TicketKind::Architecture {
                self.err(format!("{p}.kind"), "first slot of a module must be architecture");
            }
            if i > 0 && kind == TicketKind::Architecture {
                self.err(format!("{p}.kind"), "only the first slot of a module may be architecture");
            }
            let card = match s.card.as_deref() {
                None => None,
                Some("event") => Some(CardKind::Event),
                Some("action") => Some(CardKind::Action),
                Some(other) => {
                    self.err(format!("{p}.card"), format!("unknown card kind '{other}'"));
                    None
                }
            };
            out.push(SlotDef { kind, card });
        }
        out
    }

    fn ticket(&mut self, path: &str, t: &TicketDoc, ids: &mut HashSet<String>) -> Option<TicketTemplate> {
        let before = self.errors.len();
        if t.id.trim().is_empty() {
            self.err(format!("{path}.id"), "ticket id must not be empty");
        } else if !ids.insert(t.id.clone()) {
            self.err(format!("{path}.id"), format!("duplicate ticket id '{}'", t.id));
        }
        let kind = match t.kind.as_str() {
            "architecture" => Some(TicketKind::Architecture),
            "feature" => Some(TicketKind::Feature),
            other => {
                self.err(format!("{path}.kind"), format!("unknown ticket kind '{other}'"));
                None
            }
        };
        if !(1..=i64::from(MAX_TASKS)).contains(&t.tasks) {
            self.err(
                format!("{path}.tasks"),
                format!("tasks must be in 1..={MAX_TASKS}, got {}", t.tasks),
            );
        }
        let mut blocked = DigitSet::EMPTY;
        for (j, d) in t.blocked.iter().enumerate() {
            match u8::try_from(*d).ok().and_then(|v| crate::rules::Digit::new(v).ok()) {
                Some(digit) => {
                    if !blocked.insert(digit) {
                        self.err(format!("{path}.blocked[{j}]"), format!("duplicate digit {d}"));
                    }
                }
                None => self.err(format!("{path}.blocked[{j}]"), format!("digit {d} outside 1..=6")),
            }
        }
        if blocked.len() == 6 {
            self.err(
                format!("{path}.blocked"),
                "unworkable ticket: all six digits blocked",
            );
        }
        if t.users < 0 {
            self.err(format!("{path}.users"), "users must not be negative");
        }
        if kind == Some(TicketKind::Architecture) && t.users != 0 {
            self.err(format!("{path}.users"), "architecture tickets earn no users");
        }
        let users = self.int::<u32>(&format!("{path}.users"), t.users.max(0), "users");
        if self.errors.len() > before {
            return None;
        }
        Some(TicketTemplate {
            id: t.id.clone(),
            kind: kind?,
            tasks: t.tasks as u8,
            blocked,
            users: users?,
        })
    }

    fn card(&mut self, path: &str, c: &CardDoc, kind: CardKind, ids: &mut HashSet<String>) -> Option<Card> {
        let before = self.errors.len();
        if c.id.trim().is_empty() {
            self.err(format!("{path}.id"), "card id must not be empty");
        } else if !ids.insert(c.id.clone()) {
            self.err(format!("{path}.id"), format!("duplicate card id '{}'", c.id));
        }
        if c.title.trim().is_empty() {
            self.err(format!("{path}.title"), "card title must not be empty");
        }
        if c.effect.is_empty() || c.effect.len() > MAX_EFFECTS {
            self.err(
                format!("{path}.effect"),
                format!("a card needs 1..={MAX_EFFECTS} effect primitives, got {}", c.effect.len()),
            );
        }
        let mut effect = Vec::new();
        for (j, value) in c.effect.iter().enumerate() {
            match value.clone().try_into::<EffectPrimitive>() {
                Ok(e) => {
                    if kind == CardKind::Event && e.needs_binding() {
                        self.err(
                            format!("{path}.effect[{j}]"),
                            "event cards cannot use primitives that need a player choice",
                        );
                    }
                    effect.push(e);
                }
                Err(err) => self.err(format!("{path}.effect[{j}]"), format!("bad effect: {err}")),
            }
        }
        let mut aha: Vec<AhaTag> = Vec::new();
        for (j, s) in c.aha.iter().enumerate() {
            match s.parse::<AhaTag>() {
                Ok(tag) if aha.contains(&tag) => {
                    self.err(format!("{path}.aha[{j}]"), format!("duplicate aha tag '{s}'"))
                }
                Ok(tag) => aha.push(tag),
                Err(e) => self.err(format!("{path}.aha[{j}]"), e.to_string()),
            }
        }
        if kind == CardKind::Event && c.aha.is_empty() {
            self.err(format!("{path}.aha"), "event cards must carry at least one aha tag");
        }
        if kind == CardKind::Event && c.free_action {
            self.err(format!("{path}.free_action"), "only action cards can be free actions");
        }
        if self.errors.len() > before {
            return None;
        }
        Some(Card {
            id: c.id.clone(),
            kind,
            title: c.title.clone(),
            narrative: c.narrative.clone(),
            effect,
            aha,
            free_action: c.free_action,
        })
    }
}
