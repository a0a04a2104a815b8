//! What a seat sees: the whole board (the game has no hidden information
//! beyond the order of face-down piles) plus the seat's own affordances.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use techdebt_core::rules::{
    auto_bind, effective_blocked, legal_moves, Bindings, Card, CardKind, Digit, DigitSet,
    EffectPrimitive, EndReason, GameState, ModuleColumn, Phase, Scores,
};
use techdebt_core::{Move, TeamId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionStatus {
    Lobby,
    Running,
    Finished,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SeatRef {
    pub team: TeamId,
    pub seat: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeatView {
    pub team: TeamId,
    pub seat: usize,
    pub name: String,
    /// `human` or the bot's policy name.
    pub player: String,
    pub joined: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TeamView {
    pub team: TeamId,
    pub name: String,
    pub board: Vec<ModuleColumn>,
    /// Effective blocked digits of each module's in-progress ticket.
    pub blocked_now: Vec<Option<DigitSet>>,
    pub users_banked: i64,
    pub card_adjustments: i64,
    pub hand: Vec<Card>,
    pub skip_turns_pending: u32,
    pub temp_blocked: BTreeMap<Digit, u32>,
    pub bonus_pending: u32,
    pub architecture_pile: usize,
    pub feature_pile: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CardPrompt {
    pub card_id: String,
    pub title: String,
    pub narrative: String,
    /// Which bindings the card asks for.
    pub needs: Vec<String>,
    /// A legal filling the client may offer as the default.
    pub suggested: Bindings,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PileSizes {
    pub event_deck: usize,
    pub action_deck: usize,
    pub event_discard: usize,
    pub action_discard: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClientView {
    pub protocol: u32,
    pub session_id: String,
    pub status: SessionStatus,
    /// Inputs accepted so far; every push carries the value it produced.
    pub seq: u64,
    pub log_len: usize,
    pub pack_name: String,
    pub pack_version: String,
    pub round: u32,
    pub max_rounds: u32,
    pub turn_slot: u32,
    pub active_team: TeamId,
    pub phase: Phase,
    pub end_reason: Option<EndReason>,
    pub teams: Vec<TeamView>,
    pub piles: PileSizes,
    pub scores: Scores,
    pub winner: Option<TeamId>,
    pub seats: Vec<SeatView>,
    pub you: Option<SeatRef>,
    pub your_turn: bool,
    pub legal_moves: Vec<Move>,
    pub card_prompts: Vec<CardPrompt>,
}

/// A seat-independent snapshot; [`Projection::for_seat`] adds affordances.
#[derive(Debug, Clone)]
pub struct Projection {
    base: ClientView,
    legal: Vec<Move>,
    prompts: Vec<CardPrompt>,
}

fn needs(card: &Card) -> Vec<String> {
    let mut out = Vec::new();
    for p in &card.effect {
        let label = match p {
            EffectPrimitive::AddTdChosenDigit => "module, digit",
            EffectPrimitive::FreeRepaymentAttempt => "module, ticket, digit",
            p if p.needs_binding() => "module, ticket",
            _ => continue,
        };
        out.push(label.to_string());
    }
    out
}

fn team_view(state: &GameState, team: TeamId) -> TeamView {
    let t = state.team(team);
    TeamView {
        team,
        name: t.name.clone(),
        board: t.board.clone(),
        blocked_now: t
            .board
            .iter()
            .map(|c| effective_blocked(t, c.id).ok())
            .collect(),
        users_banked: t.users_banked,
        card_adjustments: t.card_adjustments,
        hand: t.hand.clone(),
        skip_turns_pending: t.skip_turns_pending,
        temp_blocked: t.temp_blocked.clone(),
        bonus_pending: t.bonus_pending,
        architecture_pile: t.architecture_pile.len(),
        feature_pile: t.feature_pile.len(),
    }
}

impl Projection {
    pub fn new(
        session_id: &str,
        status: SessionStatus,
        seq: u64,
        seats: Vec<SeatView>,
        state: &GameState,
    ) -> Self {
        let finished = state.phase() == Phase::Finished;
        let scores = state.provisional_score();
        let active = state.active_team();
        let (legal, prompts) = if status == SessionStatus::Running && !finished {
            let legal = legal_moves(state).unwrap_or_default();
            let team = state.team(active);
            let prompts = team
                .hand
                .iter()
                .filter(|c| c.needs_binding())
                .map(|c| CardPrompt {
                    card_id: c.id.clone(),
                    title: c.title.clone(),
                    narrative: c.narrative.clone(),
                    needs: needs(c),
                    suggested: auto_bind(team, c),
                })
                .collect();
            (legal, prompts)
        } else {
            (Vec::new(), Vec::new())
        };
        let base = ClientView {
            protocol: crate::PROTOCOL_VERSION,
            session_id: session_id.to_string(),
            status,
            seq,
            log_len: state.log().len(),
            pack_name: state.pack().name.clone(),
            pack_version: state.pack().version.clone(),
            round: state.round(),
            max_rounds: state.rules().max_rounds,
            turn_slot: state.turn_slot(),
            active_team: active,
            phase: state.phase(),
            end_reason: state.end_reason(),
            teams: TeamId::BOTH.iter().map(|t| team_view(state, *t)).collect(),
            piles: PileSizes {
                event_deck: state.deck(CardKind::Event).len(),
                action_deck: state.deck(CardKind::Action).len(),
                event_discard: state.discard(CardKind::Event).len(),
                action_discard: state.discard(CardKind::Action).len(),
            },
            scores,
            winner: if finished { scores.winner() } else { None },
            seats,
            you: None,
            your_turn: false,
            legal_moves: Vec::new(),
            card_prompts: Vec::new(),
        };
        Projection {
            base,
            legal,
            prompts,
        }
    }

    pub fn seq(&self) -> u64 {
        self.base.seq
    }

    pub fn is_finished(&self) -> bool {
        self.base.status == SessionStatus::Finished
    }

    /// The view for one seat, or a spectator view for `None`.
    pub fn for_seat(&self, seat: Option<SeatRef>) -> ClientView {
        let mut view = self.base.clone();
        view.you = seat;
        let active = seat.is_some_and(|s| s.team == view.active_team) && !self.legal.is_empty();
        if active {
            view.your_turn = true;
            view.legal_moves = self.legal.clone();
            view.card_prompts = self.prompts.clone();
        }
        view
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use techdebt_core::{default_pack, new_session, SessionConfig};

    #[test]
    fn seats_differ_only_in_affordances() {
        let state = new_session(&SessionConfig::new(default_pack(), 5)).unwrap();
        let p = Projection::new("s", SessionStatus::Running, 0, Vec::new(), &state);
        let mover = p.for_seat(Some(SeatRef { team: TeamId::FIRST, seat: 1 }));
        let waiter = p.for_seat(Some(SeatRef { team: TeamId::SECOND, seat: 0 }));
        assert!(mover.your_turn && !mover.legal_moves.is_empty());
        assert!(!waiter.your_turn && waiter.legal_moves.is_empty());

        let strip = |mut v: ClientView| {
            v.you = None;
            v.your_turn = false;
            v.legal_moves.clear();
            v.card_prompts.clear();
            v
        };
        assert_eq!(strip(mover), strip(waiter.clone()));
        assert_eq!(strip(waiter), p.for_seat(None));
    }

    #[test]
    fn lobby_view_offers_no_moves() {
        let state = new_session(&SessionConfig::new(default_pack(), 5)).unwrap();
        let p = Projection::new("s", SessionStatus::Lobby, 0, Vec::new(), &state);
        assert!(p.for_seat(Some(SeatRef { team: TeamId::FIRST, seat: 0 })).legal_moves.is_empty());
    }
}
