use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::card::Card;
use super::dice::{Dice, GameRng};
use super::event::{EndReason, EventKind, GameEvent};
use super::legal::validate_move;
use super::moves::Move;
use super::types::{CardKind, RulesConfig, TeamId, TeamState, Ticket, TicketKind};
use super::{RejectCode, Rejection, RulesError};
use crate::aha::AhaTag;
use crate::content::ContentPack;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    AwaitingMove,
    Finished,
}

/// Final tally for both teams, indexed by team.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scores {
    pub scores: [i64; 2],
    pub unrepaid_td: [u32; 2],
}

impl Scores {
    /// `None` on a draw.
    pub fn winner(&self) -> Option<TeamId> {
        use std::cmp::Ordering::*;
        match self.scores[0].cmp(&self.scores[1]) {
            Greater => Some(TeamId::FIRST),
            Less => Some(TeamId::SECOND),
            Equal => None,
        }
    }

    pub fn of(&self, team: TeamId) -> i64 {
        self.scores[team.index()]
    }
}

/// Complete, replayable game state.
#[derive(Debug, Clone)]
pub struct GameState {
    pub(crate) pack: Arc<ContentPack>,
    pub(crate) rules: RulesConfig,
    pub(crate) seed: u64,
    pub(crate) teams: [TeamState; 2],
    pub(crate) event_deck: Vec<Card>,
    pub(crate) action_deck: Vec<Card>,
    pub(crate) event_discard: Vec<Card>,
    pub(crate) action_discard: Vec<Card>,
    pub(crate) turn_slot: u32,
    pub(crate) round: u32,
    pub(crate) rng: GameRng,
    pub(crate) phase: Phase,
    pub(crate) end_reason: Option<EndReason>,
    pub(crate) log: Vec<GameEvent>,
}

impl GameState {
    /// Fresh game: decks and ticket piles shuffled from `seed`, team 0 to move.
    pub fn new(pack: Arc<ContentPack>, seed: u64, rules: RulesConfig, names: [&str; 2]) -> Self {
        let mut rng = GameRng::seeded(seed);

        let mut event_deck = pack.event_cards.clone();
        rng.shuffle(&mut event_deck);
        let mut action_deck = pack.action_cards.clone();
        rng.shuffle(&mut action_deck);

        let teams = TeamId::BOTH.map(|id| {
            let mut team = TeamState::new(id, names[id.index()], pack.board.clone());
            team.architecture_pile = pack.instantiate(TicketKind::Architecture);
            rng.shuffle(&mut team.architecture_pile);
            team.feature_pile = pack.instantiate(TicketKind::Feature);
            rng.shuffle(&mut team.feature_pile);
            team
        });

        let mut state = GameState {
            pack,
            rules,
            seed,
            teams,
            event_deck,
            action_deck,
            event_discard: Vec::new(),
            action_discard: Vec::new(),
            turn_slot: 0,
            round: 0,
            rng,
            phase: Phase::AwaitingMove,
            end_reason: None,
            log: Vec::new(),
        };
        state.check_game_over();
        state
    }

    pub fn pack(&self) -> &Arc<ContentPack> {
        &self.pack
    }

    pub fn rules(&self) -> RulesConfig {
        self.rules
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn team(&self, id: TeamId) -> &TeamState {
        &self.teams[id.index()]
    }

    /// Direct board access for fixtures and scripted scenarios. Moves made
    /// through here bypass the log, so replays of such a state will diverge.
    pub fn team_mut(&mut self, id: TeamId) -> &mut TeamState {
        &mut self.teams[id.index()]
    }

    pub fn teams(&self) -> &[TeamState; 2] {
        &self.teams
    }

    pub fn active_team(&self) -> TeamId {
        TeamId((self.turn_slot % 2) as u8)
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn turn_slot(&self) -> u32 {
        self.turn_slot
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn end_reason(&self) -> Option<EndReason> {
        self.end_reason
    }

    pub fn log(&self) -> &[GameEvent] {
        &self.log
    }

    pub fn deck(&self, kind: CardKind) -> &[Card] {
        match kind {
            CardKind::Event => &self.event_deck,
            CardKind::Action => &self.action_deck,
        }
    }

    pub fn discard(&self, kind: CardKind) -> &[Card] {
        match kind {
            CardKind::Event => &self.event_discard,
            CardKind::Action => &self.action_discard,
        }
    }

    /// Fixture helper: put `card` on top of its deck.
    pub fn stack_deck(&mut self, card: Card) {
        match card.kind {
            CardKind::Event => self.event_deck.push(card),
            CardKind::Action => self.action_deck.push(card),
        }
    }

    /// Fixture helper: replace the top of the team's ticket pile.
    pub fn stack_ticket(&mut self, team: TeamId, ticket: Ticket) {
        let t = &mut self.teams[team.index()];
        match ticket.kind {
            TicketKind::Architecture => t.architecture_pile.push(ticket),
            TicketKind::Feature => t.feature_pile.push(ticket),
        }
    }

    /// Fixture helper: move the game to a given round, keeping `team` active.
    pub fn set_round(&mut self, round: u32, team: TeamId) {
        self.round = round;
        self.turn_slot = round * 2 + u32::from(team.0);
        self.check_game_over();
    }

    pub(crate) fn emit(&mut self, team: TeamId, event: EventKind, tags: Vec<AhaTag>) {
        let seq = self.log.len() as u64;
        self.log.push(GameEvent {
            seq,
            round: self.round,
            team,
            event,
            tags,
        });
    }

    /// Game-end check. Module completion wins over the round limit when both hold.
    pub fn is_game_over(&self) -> Option<EndReason> {
        if self.teams.iter().any(TeamState::all_modules_complete) {
            Some(EndReason::ModulesComplete)
        } else if self.round >= self.rules.max_rounds {
            Some(EndReason::RoundLimit)
        } else {
            None
        }
    }

    /// `users_banked - td_penalty * unrepaid tiles` per team.
    pub fn final_score(&self) -> Result<Scores, RulesError> {
        if self.phase != Phase::Finished {
            return Err(RulesError::NotFinished);
        }
        Ok(self.provisional_score())
    }

    /// The tally as it would stand if the game ended now.
    pub fn provisional_score(&self) -> Scores {
        let penalty = i64::from(self.rules.td_penalty);
        let mut scores = [0i64; 2];
        let mut unrepaid = [0u32; 2];
        for team in &self.teams {
            let td = team.td_count() as u32;
            unrepaid[team.team.index()] = td;
            scores[team.team.index()] = team.users_banked - penalty * i64::from(td);
        }
        Scores {
            scores,
            unrepaid_td: unrepaid,
        }
    }

    pub(crate) fn check_game_over(&mut self) {
        if self.phase == Phase::Finished {
            return;
        }
        let Some(reason) = self.is_game_over() else {
            return;
        };
        let scores = self.provisional_score();
        for id in TeamId::BOTH {
            let users = self.teams[id.index()].users_banked;
            self.emit(
                id,
                EventKind::ScoreTallied {
                    users,
                    unrepaid_td: scores.unrepaid_td[id.index()],
                    score: scores.of(id),
                },
                Vec::new(),
            );
        }
        let active = self.active_team();
        self.emit(
            active,
            EventKind::GameEnded {
                reason,
                winner: scores.winner(),
            },
            Vec::new(),
        );
        self.phase = Phase::Finished;
        self.end_reason = Some(reason);
    }

    /// Validate and apply one move, rolling with the game's own generator.
    pub fn submit_move(&mut self, team: TeamId, mv: &Move) -> Result<(), Rejection> {
        let mut rng = self.rng.clone();
        let result = self.submit_move_with(team, mv, &mut rng);
        if result.is_ok() {
            self.rng = rng;
        }
        result
    }

    /// As [`GameState::submit_move`] but with an explicit dice source.
    /// The game's own generator is not advanced.
    pub fn submit_move_with(
        &mut self,
        team: TeamId,
        mv: &Move,
        dice: &mut dyn Dice,
    ) -> Result<(), Rejection> {
        if self.phase == Phase::Finished {
            return Err(Rejection::new(RejectCode::GameOver, "game over"));
        }
        if team != self.active_team() {
            return Err(Rejection::new(RejectCode::NotYourTurn, "not your turn"));
        }
        validate_move(self, team, mv)?;
        self.emit(team, EventKind::MoveAccepted { mv: mv.clone() }, Vec::new());
        let consumes_turn = self
            .apply_move(team, mv, dice)
            .unwrap_or_else(|e| panic!("validated move {mv} failed to apply: {e}"));
        if consumes_turn {
            self.end_turn();
        }
        self.check_game_over();
        Ok(())
    }

    /// Cut the game at the current round, as when a wall clock runs out.
    pub fn expire_clock(&mut self) {
        if self.phase == Phase::Finished {
            return;
        }
        self.rules.max_rounds = self.round;
        let active = self.active_team();
        self.emit(
            active,
            EventKind::ClockExpired {
                max_rounds: self.round,
            },
            Vec::new(),
        );
        self.check_game_over();
    }

    fn apply_move(
        &mut self,
        team: TeamId,
        mv: &Move,
        dice: &mut dyn Dice,
    ) -> Result<bool, RulesError> {
        match mv {
            Move::Work { module, incur } => {
                let roll = dice.roll();
                self.log_roll(team, roll, super::RollPurpose::Work);
                self.apply_work(team, *module, incur, roll, dice)?;
                Ok(true)
            }
            Move::Repay { target } => {
                let roll = dice.roll();
                self.log_roll(team, roll, super::RollPurpose::Repay);
                self.apply_repay(team, *target, roll)?;
                Ok(true)
            }
            Move::PlayAction { card_id, bindings } => {
                let hand = &mut self.teams[team.index()].hand;
                let pos = hand
                    .iter()
                    .position(|c| &c.id == card_id)
                    .ok_or_else(|| RulesError::CardNotInHand(card_id.clone()))?;
                let card = hand.remove(pos);
                self.emit(
                    team,
                    EventKind::CardPlayed {
                        card_id: card.id.clone(),
                    },
                    Vec::new(),
                );
                self.apply_effect(team, &card.id, &card.effect, bindings, dice)?;
                let free = card.free_action;
                self.action_discard.push(card);
                Ok(!free)
            }
            Move::StartTicket { module } => {
                self.start_ticket(team, *module, dice)?;
                Ok(true)
            }
        }
    }

    pub(crate) fn log_roll(&mut self, team: TeamId, roll: super::DiceRoll, purpose: super::RollPurpose) {
        self.emit(team, EventKind::DiceRolled { roll, purpose }, Vec::new());
    }

    fn advance_slot(&mut self) {
        self.turn_slot += 1;
        if self.turn_slot.is_multiple_of(2) {
            self.round += 1;
            for team in &mut self.teams {
                for rounds in team.temp_blocked.values_mut() {
                    *rounds = rounds.saturating_sub(1);
                }
                team.temp_blocked.retain(|_, r| *r > 0);
            }
        }
    }

    fn end_turn(&mut self) {
        self.advance_slot();
        loop {
            if self.is_game_over().is_some() {
                return;
            }
            let next = self.active_team();
            let pending = &mut self.teams[next.index()].skip_turns_pending;
            if *pending == 0 {
                return;
            }
            *pending -= 1;
            self.emit(next, EventKind::TurnSkipped, Vec::new());
            self.advance_slot();
        }
    }
}
