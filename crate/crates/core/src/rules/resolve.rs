//! Rule resolution: work, repayment, ticket flow, cards and effects.

use super::card::{Bindings, EffectPrimitive, TicketSelector};
use super::dice::{Dice, DiceRoll, Digit, DigitSet};
use super::event::{EventKind, RollPurpose};
use super::state::GameState;
use super::types::{CardKind, ModuleId, RepaymentTarget, TeamId, TeamState, TicketKind, TicketRef};
use super::RulesError;
use crate::aha::AhaTag;

/// Digits that cannot progress the module's in-progress ticket: its printed
/// blocks, every TD tile on placed tickets of the same module, and the
/// team's temporary blocks. Other modules are never consulted.
pub fn effective_blocked(team: &TeamState, module: ModuleId) -> Result<DigitSet, RulesError> {
    let column = team.module(module);
    let ticket = column
        .in_progress
        .as_ref()
        .ok_or(RulesError::NothingToWorkOn(module))?;
    Ok(ticket
        .blocked
        .union(column.placed_td())
        .union(team.temp_blocked_set()))
}

/// What one work roll does to a ticket, before clamping to the tasks left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WorkOutcome {
    pub tasks: u8,
    pub td: Option<Digit>,
    pub conscious: bool,
}

impl WorkOutcome {
    const NONE: WorkOutcome = WorkOutcome {
        tasks: 0,
        td: None,
        conscious: false,
    };
}

/// The work rule table.
///
/// `blocked` is the effective blocked set, `own_td` the tiles already on the
/// ticket being worked, `incur` the conditional conscious-incurrence list.
pub fn resolve_work(blocked: DigitSet, own_td: DigitSet, incur: &[Digit], roll: DiceRoll) -> WorkOutcome {
    if roll.is_double() && !blocked.contains(roll.first) {
        let d = roll.first;
        return if own_td.contains(d) {
            WorkOutcome {
                tasks: 1,
                td: None,
                conscious: false,
            }
        } else {
            WorkOutcome {
                tasks: 2,
                td: Some(d),
                conscious: false,
            }
        };
    }
    let rolled = roll.digits();
    if !rolled.difference(blocked).is_empty() {
        return WorkOutcome {
            tasks: 1,
            td: None,
            conscious: false,
        };
    }
    match incur
        .iter()
        .find(|d| rolled.contains(**d) && blocked.contains(**d) && !own_td.contains(**d))
    {
        Some(&d) => WorkOutcome {
            tasks: 1,
            td: Some(d),
            conscious: true,
        },
        None => WorkOutcome::NONE,
    }
}

/// Repayment threshold: feature TD needs a 4+, architecture TD a 5+, on either die.
pub fn repay_succeeds(kind: TicketKind, roll: DiceRoll) -> bool {
    let threshold = match kind {
        TicketKind::Feature => 4,
        TicketKind::Architecture => 5,
    };
    roll.max().value() >= threshold
}

fn incur_tags(kind: TicketKind, conscious: Option<bool>, vicious: bool) -> Vec<AhaTag> {
    let mut tags = Vec::new();
    match conscious {
        Some(true) => tags.push(AhaTag::INCURRENCE_CONSCIOUS),
        Some(false) => tags.push(AhaTag::INCURRENCE_UNCONSCIOUS),
        None => {}
    }
    if kind == TicketKind::Architecture {
        tags.push(AhaTag::ARCHITECTURE_CRITICAL);
    }
    if vicious {
        tags.push(AhaTag::VICIOUS_INNER);
    }
    tags
}

impl GameState {
    /// Resolve one work roll on the module's in-progress ticket.
    pub fn apply_work(
        &mut self,
        team: TeamId,
        module: ModuleId,
        incur: &[Digit],
        roll: DiceRoll,
        dice: &mut dyn Dice,
    ) -> Result<WorkOutcome, RulesError> {
        let t = &self.teams[team.index()];
        let blocked = effective_blocked(t, module)?;
        let column = t.module(module);
        let ticket = column.in_progress.as_ref().expect("checked by effective_blocked");
        if let Some(bad) = incur
            .iter()
            .find(|d| !blocked.contains(**d) || ticket.td.contains(**d))
        {
            return Err(RulesError::IllegalIncur(*bad));
        }
        let outcome = resolve_work(blocked, ticket.td, incur, roll);
        let vicious = !column.placed_td().is_empty();
        let kind = ticket.kind;
        let ticket_id = ticket.id.clone();

        if let Some(digit) = outcome.td {
            self.teams[team.index()]
                .module_mut(module)
                .in_progress
                .as_mut()
                .expect("in progress")
                .td
                .insert(digit);
            self.emit(
                team,
                EventKind::TdIncurred {
                    module,
                    ticket: TicketRef::InProgress,
                    ticket_id: ticket_id.clone(),
                    digit,
                    conscious: outcome.conscious,
                    card_id: None,
                },
                incur_tags(kind, Some(outcome.conscious), vicious),
            );
        }
        if outcome.tasks == 0 {
            self.emit(team, EventKind::NoProgress { module, ticket_id }, Vec::new());
            return Ok(outcome);
        }
        self.complete_tasks(team, module, outcome.tasks, dice)?;
        Ok(outcome)
    }

    /// Add up to `count` tasks to the in-progress ticket, completing it if full.
    fn complete_tasks(
        &mut self,
        team: TeamId,
        module: ModuleId,
        count: u8,
        dice: &mut dyn Dice,
    ) -> Result<(), RulesError> {
        let ticket = self.teams[team.index()]
            .module_mut(module)
            .in_progress
            .as_mut()
            .ok_or(RulesError::NothingToWorkOn(module))?;
        let done = count.min(ticket.remaining());
        ticket.tasks_done += done;
        let event = EventKind::TaskCompleted {
            module,
            ticket_id: ticket.id.clone(),
            count: done,
            tasks_done: ticket.tasks_done,
        };
        let complete = ticket.is_complete();
        self.emit(team, event, Vec::new());
        if complete {
            self.complete_ticket(team, module, dice)?;
        }
        Ok(())
    }

    /// A dedicated repayment turn. Returns whether the tile came off.
    pub fn apply_repay(
        &mut self,
        team: TeamId,
        target: RepaymentTarget,
        roll: DiceRoll,
    ) -> Result<bool, RulesError> {
        self.resolve_repayment(team, target, roll, None)
    }

    fn resolve_repayment(
        &mut self,
        team: TeamId,
        target: RepaymentTarget,
        roll: DiceRoll,
        card_id: Option<&str>,
    ) -> Result<bool, RulesError> {
        let ticket = self.teams[team.index()]
            .module_mut(target.module)
            .ticket_mut(target.ticket)
            .filter(|t| t.td.contains(target.digit))
            .ok_or(RulesError::NothingToRepay)?;
        let kind = ticket.kind;
        let ticket_id = ticket.id.clone();
        if repay_succeeds(kind, roll) {
            ticket.td.remove(target.digit);
            self.emit(
                team,
                EventKind::TdRepaid {
                    module: target.module,
                    ticket: target.ticket,
                    ticket_id,
                    digit: target.digit,
                    card_id: card_id.map(str::to_string),
                },
                vec![AhaTag::REPAYMENT_BENEFITS],
            );
            Ok(true)
        } else {
            let mut tags = vec![AhaTag::REPAYMENT_DIFFICULT, AhaTag::REPAYMENT_TIME_CONSUMING];
            if kind == TicketKind::Architecture {
                tags.push(AhaTag::ARCHITECTURE_HARD_TO_REPAY);
            }
            self.emit(
                team,
                EventKind::RepaymentFailed {
                    module: target.module,
                    ticket: target.ticket,
                    ticket_id,
                    digit: target.digit,
                },
                tags,
            );
            Ok(false)
        }
    }

    /// Take the next ticket of the kind the module's next slot expects.
    pub fn start_ticket(
        &mut self,
        team: TeamId,
        module: ModuleId,
        dice: &mut dyn Dice,
    ) -> Result<(), RulesError> {
        let pack = self.pack.clone();
        let t = &mut self.teams[team.index()];
        let column = t.module(module);
        let slot_index = column.placed.len();
        let slot = column.next_slot().ok_or(RulesError::NoFreeSlot(module))?;
        let pile = match slot.kind {
            TicketKind::Architecture => &mut t.architecture_pile,
            TicketKind::Feature => &mut t.feature_pile,
        };
        if pile.is_empty() {
            let mut fresh = pack.instantiate(slot.kind);
            if fresh.is_empty() {
                return Err(RulesError::NoTicketTemplates(slot.kind));
            }
            // Reshuffle through the dice so the order stays seed-determined.
            for i in (1..fresh.len()).rev() {
                let j = dice.pick(i + 1);
                fresh.swap(i, j);
            }
            *pile = fresh;
        }
        let mut ticket = pile.pop().expect("pile refilled");
        ticket.card_trigger = slot.card;
        ticket.tasks_done = 0;
        ticket.td = DigitSet::EMPTY;
        let event = EventKind::TicketStarted {
            module,
            ticket_id: ticket.id.clone(),
            kind: ticket.kind,
            slot: slot_index,
        };
        t.module_mut(module).in_progress = Some(ticket);
        self.emit(team, event, Vec::new());
        Ok(())
    }

    /// Move a finished ticket into its slot, bank its users and fire the
    /// slot's card trigger.
    pub fn complete_ticket(
        &mut self,
        team: TeamId,
        module: ModuleId,
        dice: &mut dyn Dice,
    ) -> Result<(), RulesError> {
        let t = &mut self.teams[team.index()];
        let column = t.module_mut(module);
        match &column.in_progress {
            Some(ticket) if ticket.is_complete() => {}
            Some(_) => return Err(RulesError::TicketIncomplete(module)),
            None => return Err(RulesError::NothingToWorkOn(module)),
        }
        let ticket = column.in_progress.take().expect("checked above");
        let users = match ticket.kind {
            TicketKind::Feature => ticket.users,
            TicketKind::Architecture => 0,
        };
        let trigger = ticket.card_trigger;
        let event = EventKind::TicketCompleted {
            module,
            ticket_id: ticket.id.clone(),
            kind: ticket.kind,
            users,
        };
        column.placed.push(ticket);
        t.users_banked += i64::from(users);
        let bonus = users > 0 && t.bonus_pending > 0;
        if bonus {
            t.bonus_pending -= 1;
            t.users_banked += i64::from(users);
            t.card_adjustments += i64::from(users);
        }
        self.emit(team, event, Vec::new());
        if bonus {
            self.emit(
                team,
                EventKind::UsersAdjusted {
                    card_id: "bonus".to_string(),
                    amount: i64::from(users),
                },
                Vec::new(),
            );
        }
        if let Some(kind) = trigger {
            self.draw_card(team, kind, dice);
        }
        Ok(())
    }

    /// Draw from the deck of `kind`; an empty deck is refilled by shuffling its
    /// discard pile. Event cards resolve at once, action cards go to hand.
    pub fn draw_card(&mut self, team: TeamId, kind: CardKind, dice: &mut dyn Dice) {
        let (deck, discard) = match kind {
            CardKind::Event => (&mut self.event_deck, &mut self.event_discard),
            CardKind::Action => (&mut self.action_deck, &mut self.action_discard),
        };
        if deck.is_empty() {
            if discard.is_empty() {
                self.emit(team, EventKind::DrawSkipped { kind }, Vec::new());
                return;
            }
            std::mem::swap(deck, discard);
            for i in (1..deck.len()).rev() {
                let j = dice.pick(i + 1);
                deck.swap(i, j);
            }
            let size = deck.len();
            self.emit(team, EventKind::DeckReshuffled { kind, size }, Vec::new());
        }
        let deck = match kind {
            CardKind::Event => &mut self.event_deck,
            CardKind::Action => &mut self.action_deck,
        };
        let card = deck.pop().expect("deck refilled");
        self.emit(
            team,
            EventKind::CardDrawn {
                card_id: card.id.clone(),
                kind,
            },
            card.aha.clone(),
        );
        match kind {
            CardKind::Event => {
                // Event cards never carry choice primitives, so these cannot fail.
                let _ = self.apply_effect(team, &card.id, &card.effect, &Bindings::default(), dice);
                self.event_discard.push(card);
            }
            CardKind::Action => self.teams[team.index()].hand.push(card),
        }
    }

    /// Interpret a card's effect list against the acting team. Targets that
    /// do not exist turn a primitive into a logged no-op.
    pub fn apply_effect(
        &mut self,
        team: TeamId,
        card_id: &str,
        effect: &[EffectPrimitive],
        bindings: &Bindings,
        dice: &mut dyn Dice,
    ) -> Result<(), RulesError> {
        for primitive in effect {
            self.apply_primitive(team, card_id, *primitive, bindings, dice)?;
        }
        Ok(())
    }

    fn applied(&mut self, team: TeamId, card_id: &str, effect: EffectPrimitive, applied: bool, detail: String) {
        self.emit(
            team,
            EventKind::EffectApplied {
                card_id: card_id.to_string(),
                effect,
                applied,
                detail,
            },
            Vec::new(),
        );
    }

    fn apply_primitive(
        &mut self,
        team: TeamId,
        card_id: &str,
        primitive: EffectPrimitive,
        bindings: &Bindings,
        dice: &mut dyn Dice,
    ) -> Result<(), RulesError> {
        match primitive {
            EffectPrimitive::AddTdRandomDigit { target } => {
                let Some((module, r)) = select_ticket(self.team(team), target, bindings, dice) else {
                    self.applied(team, card_id, primitive, false, "no target ticket".into());
                    return Ok(());
                };
                let ticket = self.team(team).module(module).ticket(r).expect("selected");
                let free: Vec<Digit> = ticket.td.complement().iter().collect();
                if free.is_empty() {
                    self.applied(team, card_id, primitive, false, "ticket fully covered".into());
                    return Ok(());
                }
                let digit = free[dice.pick(free.len())];
                self.add_td(team, card_id, module, r, digit, None);
                self.applied(team, card_id, primitive, true, format!("TD on {module} digit {digit}"));
            }
            EffectPrimitive::AddTdChosenDigit => {
                let target = bindings
                    .module
                    .zip(bindings.digit)
                    .filter(|(m, d)| {
                        self.team(team)
                            .module(*m)
                            .ticket(bindings.ticket_ref())
                            .is_some_and(|t| !t.td.contains(*d))
                    });
                match target {
                    Some((module, digit)) => {
                        self.add_td(team, card_id, module, bindings.ticket_ref(), digit, Some(true));
                        self.applied(team, card_id, primitive, true, format!("TD on {module} digit {digit}"));
                    }
                    None => self.applied(team, card_id, primitive, false, "no target ticket".into()),
                }
            }
            EffectPrimitive::RemoveTd { target } => {
                let Some((module, r)) = select_ticket(self.team(team), target, bindings, dice) else {
                    self.applied(team, card_id, primitive, false, "no target ticket".into());
                    return Ok(());
                };
                let ticket = self.team(team).module(module).ticket(r).expect("selected");
                let tiles: Vec<Digit> = ticket.td.iter().collect();
                let digit = match (target, bindings.digit) {
                    (TicketSelector::Chosen, Some(d)) if ticket.td.contains(d) => Some(d),
                    _ if tiles.is_empty() => None,
                    _ => Some(tiles[dice.pick(tiles.len())]),
                };
                let Some(digit) = digit else {
                    self.applied(team, card_id, primitive, false, "no TD to remove".into());
                    return Ok(());
                };
                let ticket = self.teams[team.index()]
                    .module_mut(module)
                    .ticket_mut(r)
                    .expect("selected");
                ticket.td.remove(digit);
                let ticket_id = ticket.id.clone();
                self.emit(
                    team,
                    EventKind::TdRepaid {
                        module,
                        ticket: r,
                        ticket_id,
                        digit,
                        card_id: Some(card_id.to_string()),
                    },
                    vec![AhaTag::REPAYMENT_BENEFITS],
                );
                self.applied(team, card_id, primitive, true, format!("removed TD {module} digit {digit}"));
            }
            EffectPrimitive::FreeRepaymentAttempt => {
                let target = match (bindings.module, bindings.digit) {
                    (Some(module), Some(digit)) => Some(RepaymentTarget {
                        module,
                        ticket: bindings.ticket_ref(),
                        digit,
                    }),
                    _ => None,
                };
                let valid = target.filter(|t| {
                    self.team(team)
                        .module(t.module)
                        .ticket(t.ticket)
                        .is_some_and(|tk| tk.td.contains(t.digit))
                });
                match valid {
                    Some(target) => {
                        let roll = dice.roll();
                        self.log_roll(team, roll, RollPurpose::Card);
                        let ok = self.resolve_repayment(team, target, roll, Some(card_id))?;
                        let detail = if ok { "repaid" } else { "repayment failed" };
                        self.applied(team, card_id, primitive, true, detail.into());
                    }
                    None => self.applied(team, card_id, primitive, false, "no TD to repay".into()),
                }
            }
            EffectPrimitive::SkipNextTurn => {
                self.teams[team.index()].skip_turns_pending += 1;
                self.applied(team, card_id, primitive, true, String::new());
            }
            EffectPrimitive::CompleteOneTask { target } => {
                let selected = select_ticket(self.team(team), target, bindings, dice)
                    .filter(|(_, r)| *r == TicketRef::InProgress);
                match selected {
                    Some((module, _)) => {
                        self.applied(team, card_id, primitive, true, format!("task on {module}"));
                        self.complete_tasks(team, module, 1, dice)?;
                    }
                    None => self.applied(team, card_id, primitive, false, "no ticket in progress".into()),
                }
            }
            EffectPrimitive::BlockDigitForRounds { digit, rounds } => {
                let entry = self.teams[team.index()].temp_blocked.entry(digit).or_insert(0);
                *entry = (*entry).max(rounds);
                let applied = rounds > 0;
                if !applied {
                    self.teams[team.index()].temp_blocked.remove(&digit);
                }
                self.applied(team, card_id, primitive, applied, format!("digit {digit} for {rounds} rounds"));
            }
            EffectPrimitive::RevealOpponentTd => {
                let n = self.team(team.other()).td_count();
                self.applied(team, card_id, primitive, true, format!("opponent carries {n} TD tiles"));
            }
            EffectPrimitive::DoubleNextTicketUsers => {
                self.teams[team.index()].bonus_pending += 1;
                self.applied(team, card_id, primitive, true, String::new());
            }
        }
        Ok(())
    }

    fn add_td(
        &mut self,
        team: TeamId,
        card_id: &str,
        module: ModuleId,
        r: TicketRef,
        digit: Digit,
        conscious: Option<bool>,
    ) {
        let column = self.teams[team.index()].module_mut(module);
        let vicious = r == TicketRef::InProgress && !column.placed_td().is_empty();
        let ticket = column.ticket_mut(r).expect("caller checked");
        ticket.td.insert(digit);
        let kind = ticket.kind;
        let ticket_id = ticket.id.clone();
        self.emit(
            team,
            EventKind::TdIncurred {
                module,
                ticket: r,
                ticket_id,
                digit,
                conscious: conscious.unwrap_or(false),
                card_id: Some(card_id.to_string()),
            },
            incur_tags(kind, conscious, vicious),
        );
    }
}

/// Resolve a selector against a team's board.
pub(crate) fn select_ticket(
    team: &TeamState,
    selector: TicketSelector,
    bindings: &Bindings,
    dice: &mut dyn Dice,
) -> Option<(ModuleId, TicketRef)> {
    match selector {
        TicketSelector::NewestPlaced => team
            .board
            .iter()
            .filter(|c| !c.placed.is_empty())
            .max_by(|a, b| a.placed.len().cmp(&b.placed.len()).then(b.id.cmp(&a.id)))
            .map(|c| (c.id, TicketRef::Placed(c.placed.len() - 1))),
        TicketSelector::OldestPlaced => team
            .board
            .iter()
            .find(|c| !c.placed.is_empty())
            .map(|c| (c.id, TicketRef::Placed(0))),
        TicketSelector::InProgress => team
            .board
            .iter()
            .find(|c| c.in_progress.is_some())
            .map(|c| (c.id, TicketRef::InProgress)),
        TicketSelector::Random => {
            let all: Vec<(ModuleId, TicketRef)> = team
                .board
                .iter()
                .flat_map(|c| c.tickets().map(move |(r, _)| (c.id, r)))
                .collect();
            if all.is_empty() {
                None
            } else {
                Some(all[dice.pick(all.len())])
            }
        }
        TicketSelector::Chosen => {
            let module = bindings.module?;
            let r = bindings.ticket_ref();
            team.module(module).ticket(r).map(|_| (module, r))
        }
    }
}
