//! Move generation and validation.

use super::card::{Bindings, Card, EffectPrimitive, TicketSelector};
use super::dice::Digit;
use super::moves::Move;
use super::resolve::effective_blocked;
use super::state::{GameState, Phase};
use super::types::{ModuleId, TeamId, TeamState, TicketRef};
use super::{RejectCode, Rejection, RulesError};

/// Every option open to the active team, with free parameters left empty.
///
/// Order: Work per in-progress module, Repay per TD tile, PlayAction per card
/// in hand, StartTicket per module with a free slot.
pub fn legal_moves(state: &GameState) -> Result<Vec<Move>, RulesError> {
    if state.phase() == Phase::Finished {
        return Err(RulesError::GameOver);
    }
    let team = state.team(state.active_team());
    let mut moves = Vec::new();
    for column in &team.board {
        if column.in_progress.is_some() {
            moves.push(Move::work(column.id));
        }
    }
    for target in team.td_tiles() {
        moves.push(Move::Repay { target });
    }
    for card in &team.hand {
        moves.push(Move::PlayAction {
            card_id: card.id.clone(),
            bindings: Bindings::default(),
        });
    }
    for column in &team.board {
        if column.next_slot().is_some() {
            moves.push(Move::StartTicket { module: column.id });
        }
    }
    Ok(moves)
}

/// Full legality check for `team` submitting `mv`, including the free
/// parameters. Turn order and game phase are the caller's concern.
pub fn validate_move(state: &GameState, team: TeamId, mv: &Move) -> Result<(), Rejection> {
    let t = state.team(team);
    match mv {
        Move::Work { module, incur } => {
            let blocked = effective_blocked(t, *module).map_err(|e| {
                Rejection::new(RejectCode::IllegalMove, e.to_string())
            })?;
            let own_td = t.module(*module).in_progress.as_ref().map(|tk| tk.td).unwrap_or_default();
            let mut seen = Vec::with_capacity(incur.len());
            for d in incur {
                if !blocked.contains(*d) || own_td.contains(*d) || seen.contains(d) {
                    return Err(Rejection::new(
                        RejectCode::IllegalIncur,
                        RulesError::IllegalIncur(*d).to_string(),
                    ));
                }
                seen.push(*d);
            }
            Ok(())
        }
        Move::Repay { target } => {
            let has_tile = t
                .module(target.module)
                .ticket(target.ticket)
                .is_some_and(|tk| tk.td.contains(target.digit));
            if has_tile {
                Ok(())
            } else {
                Err(Rejection::new(RejectCode::NothingToRepay, "nothing to repay"))
            }
        }
        Move::PlayAction { card_id, bindings } => {
            let card = t.hand.iter().find(|c| &c.id == card_id).ok_or_else(|| {
                Rejection::new(RejectCode::UnknownCard, format!("card '{card_id}' is not in hand"))
            })?;
            validate_bindings(t, card, bindings)
        }
        Move::StartTicket { module } => {
            if t.module(*module).next_slot().is_some() {
                Ok(())
            } else {
                Err(Rejection::new(
                    RejectCode::IllegalMove,
                    RulesError::NoFreeSlot(*module).to_string(),
                ))
            }
        }
    }
}

fn has_any_ticket(team: &TeamState) -> bool {
    team.board.iter().any(|c| c.tickets().next().is_some())
}

fn has_in_progress(team: &TeamState) -> bool {
    team.board.iter().any(|c| c.in_progress.is_some())
}

fn validate_bindings(team: &TeamState, card: &Card, b: &Bindings) -> Result<(), Rejection> {
    let required = |what: &str| {
        Rejection::new(
            RejectCode::BindingRequired,
            format!("binding required: card '{}' needs {what}", card.id),
        )
    };
    let invalid = |what: &str| {
        Rejection::new(
            RejectCode::InvalidBinding,
            format!("invalid binding for card '{}': {what}", card.id),
        )
    };
    let bound_ticket = || b.module.and_then(|m| team.module(m).ticket(b.ticket_ref()));

    for primitive in &card.effect {
        match primitive {
            EffectPrimitive::FreeRepaymentAttempt => {
                if team.td_count() == 0 {
                    continue;
                }
                let (Some(_), Some(digit)) = (b.module, b.digit) else {
                    return Err(required("a TD tile (module, ticket, digit)"));
                };
                if !bound_ticket().is_some_and(|t| t.td.contains(digit)) {
                    return Err(invalid("no TD tile at the bound position"));
                }
            }
            EffectPrimitive::AddTdChosenDigit => {
                if !has_any_ticket(team) {
                    continue;
                }
                let (Some(_), Some(_)) = (b.module, b.digit) else {
                    return Err(required("a module and a digit"));
                };
                if bound_ticket().is_none() {
                    return Err(invalid("no ticket at the bound position"));
                }
            }
            EffectPrimitive::CompleteOneTask {
                target: TicketSelector::Chosen,
            } => {
                if !has_in_progress(team) {
                    continue;
                }
                if b.module.is_none() {
                    return Err(required("a module with a ticket in progress"));
                }
                if b.ticket_ref() != TicketRef::InProgress || bound_ticket().is_none() {
                    return Err(invalid("bound ticket is not in progress"));
                }
            }
            EffectPrimitive::RemoveTd {
                target: TicketSelector::Chosen,
            } => {
                if team.td_count() == 0 {
                    continue;
                }
                if b.module.is_none() {
                    return Err(required("a ticket carrying TD"));
                }
                if !bound_ticket().is_some_and(|t| !t.td.is_empty()) {
                    return Err(invalid("no TD on the bound ticket"));
                }
            }
            EffectPrimitive::AddTdRandomDigit {
                target: TicketSelector::Chosen,
            } => {
                if !has_any_ticket(team) {
                    continue;
                }
                if b.module.is_none() {
                    return Err(required("a ticket"));
                }
                if bound_ticket().is_none() {
                    return Err(invalid("no ticket at the bound position"));
                }
            }
            _ => {}
        }
    }
    Ok(())
}

/// Deterministic default choices for a card, used by bots and as the
/// pre-filled suggestion in the client.
///
/// Repayment-style cards aim at a tile on a placed ticket of a module with
/// work in progress (the tile that is blocking something), falling back to
/// any tile. Incurrence-style cards aim at the first in-progress ticket and
/// its lowest blocked digit without TD.
pub fn auto_bind(team: &TeamState, card: &Card) -> Bindings {
    let wants_tile = card.effect.iter().any(|p| {
        matches!(
            p,
            EffectPrimitive::FreeRepaymentAttempt
                | EffectPrimitive::RemoveTd {
                    target: TicketSelector::Chosen
                }
        )
    });
    if wants_tile {
        let tiles = team.td_tiles();
        let blocking = tiles.iter().find(|t| {
            matches!(t.ticket, TicketRef::Placed(_)) && team.module(t.module).in_progress.is_some()
        });
        if let Some(t) = blocking.or(tiles.first()) {
            return Bindings {
                module: Some(t.module),
                ticket: Some(t.ticket),
                digit: Some(t.digit),
            };
        }
        return Bindings::default();
    }
    if !card.needs_binding() {
        return Bindings::default();
    }
    let Some(column) = team.board.iter().find(|c| c.in_progress.is_some()) else {
        return first_ticket_binding(team);
    };
    let ticket = column.in_progress.as_ref().expect("found");
    let blocked = effective_blocked(team, column.id).unwrap_or_default();
    let digit = blocked
        .difference(ticket.td)
        .iter()
        .next()
        .or_else(|| ticket.td.complement().iter().next());
    Bindings {
        module: Some(column.id),
        ticket: Some(TicketRef::InProgress),
        digit,
    }
}

fn first_ticket_binding(team: &TeamState) -> Bindings {
    for column in &team.board {
        if let Some((r, t)) = column.tickets().next() {
            return Bindings {
                module: Some(column.id),
                ticket: Some(r),
                digit: t.td.complement().iter().next().or(Some(Digit::ALL[0])),
            };
        }
    }
    Bindings::default()
}

/// Shorthand used by policies: the module whose in-progress ticket has the
/// fewest effectively blocked digits.
pub fn least_blocked_module(team: &TeamState) -> Option<ModuleId> {
    team.board
        .iter()
        .filter(|c| c.in_progress.is_some())
        .min_by_key(|c| effective_blocked(team, c.id).map(|b| b.len()).unwrap_or(6))
        .map(|c| c.id)
}
