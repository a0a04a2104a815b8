//! Shared test support: an independent work-rule oracle and board fixtures.
#![allow(dead_code)]

use techdebt_core::content::default_pack;
use techdebt_core::rules::{
    resolve_work, DiceRoll, Digit, DigitSet, EventKind, GameState, ModuleId, Move, RulesConfig,
    ScriptedDice, TeamId, Ticket, TicketKind,
};

/// What the oracle expects from one work roll.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Expected {
    pub tasks: u8,
    pub td: Option<u8>,
    pub conscious: bool,
}

fn bit(d: u8) -> u8 {
    1 << d
}

/// The work rule written out as a decision table over raw bitmasks
/// (bit d set = digit d), sharing no code with the engine.
///
/// 1. An unblocked double places TD on its digit and completes two tasks, or
///    one task if that digit already carries TD on this ticket.
/// 2. Otherwise, any unblocked rolled digit completes one task.
/// 3. Otherwise, the first incur entry that was rolled, is blocked and is not
///    yet TD on the ticket is taken as conscious TD for one task.
/// 4. Otherwise nothing happens.
pub fn oracle(blocked: u8, own_td: u8, incur: &[u8], a: u8, b: u8) -> Expected {
    let free = |d: u8| blocked & bit(d) == 0;
    if a == b && free(a) {
        return if own_td & bit(a) != 0 {
            Expected { tasks: 1, td: None, conscious: false }
        } else {
            Expected { tasks: 2, td: Some(a), conscious: false }
        };
    }
    if a != b && (free(a) || free(b)) {
        return Expected { tasks: 1, td: None, conscious: false };
    }
    for &d in incur {
        if (d == a || d == b) && !free(d) && own_td & bit(d) == 0 {
            return Expected { tasks: 1, td: Some(d), conscious: true };
        }
    }
    Expected { tasks: 0, td: None, conscious: false }
}

pub fn mask_to_set(mask: u8) -> DigitSet {
    (1..=6).filter(|d| mask & bit(*d) != 0).map(digit).collect()
}

pub fn digit(d: u8) -> Digit {
    Digit::new(d).expect("digit in range")
}

pub fn roll(a: u8, b: u8) -> DiceRoll {
    DiceRoll::of(a, b)
}

/// All 64 subsets of the six digits as bitmasks.
pub fn all_masks() -> impl Iterator<Item = u8> {
    (0u8..64).map(|m| m << 1)
}

/// The incur lists tried for a ticket: none, each legal digit alone, every
/// ordered pair of legal digits, and all legal digits ascending and descending.
pub fn incur_lists(blocked: u8, own_td: u8) -> Vec<Vec<u8>> {
    let legal: Vec<u8> = (1..=6).filter(|d| blocked & bit(*d) != 0 && own_td & bit(*d) == 0).collect();
    let mut lists = vec![Vec::new()];
    lists.extend(legal.iter().map(|d| vec![*d]));
    for a in &legal {
        for b in &legal {
            if a != b {
                lists.push(vec![*a, *b]);
            }
        }
    }
    if legal.len() > 2 {
        lists.push(legal.clone());
        lists.push(legal.iter().rev().copied().collect());
    }
    lists
}

pub fn ticket(kind: TicketKind, tasks: u8, blocked: &[u8], users: u32) -> Ticket {
    Ticket {
        id: format!("fixture-{kind:?}-{tasks}").to_lowercase(),
        kind,
        tasks_required: tasks,
        tasks_done: 0,
        blocked: blocked.iter().map(|d| digit(*d)).collect(),
        td: DigitSet::EMPTY,
        users,
        card_trigger: None,
    }
}

pub fn fresh_game(seed: u64) -> GameState {
    let pack = default_pack();
    let rules = RulesConfig {
        max_rounds: 60,
        td_penalty: 1,
    };
    GameState::new(pack, seed, rules, ["Red", "Blue"])
}

/// A game where team 0 has `t` in progress on module A and nothing else.
pub fn game_with_ticket(t: Ticket) -> GameState {
    let mut state = fresh_game(7);
    state.team_mut(TeamId::FIRST).module_mut(ModuleId::A).in_progress = Some(t);
    state
}

/// `resolve_work` against the oracle for every blocked set, every set of
/// tiles already on the ticket, every tried incur list and all 36 rolls.
/// Returns the number of cases checked.
pub fn check_resolve_work() -> Result<usize, String> {
    let mut cases = 0;
    for blocked in all_masks() {
        for own in all_masks() {
            for incur in incur_lists(blocked, own) {
                let incur_digits: Vec<Digit> = incur.iter().map(|d| digit(*d)).collect();
                for a in 1..=6 {
                    for b in 1..=6 {
                        let want = oracle(blocked, own, &incur, a, b);
                        let got = resolve_work(mask_to_set(blocked), mask_to_set(own), &incur_digits, roll(a, b));
                        let got = Expected {
                            tasks: got.tasks,
                            td: got.td.map(Digit::value),
                            conscious: got.conscious,
                        };
                        if got != want {
                            return Err(format!(
                                "blocked {} own {} incur {incur:?} roll ({a},{b}): engine {got:?}, oracle {want:?}",
                                mask_to_set(blocked),
                                mask_to_set(own)
                            ));
                        }
                        cases += 1;
                    }
                }
            }
        }
    }
    Ok(cases)
}

/// Full `Work` moves through the engine, against the oracle: tasks done,
/// tiles placed and the logged events. Part of the blocked set is printed on
/// the ticket and part comes from TD on a placed ticket in the same module.
/// Own tiles range over the subsets of size at most two.
pub fn check_apply_work() -> Result<usize, String> {
    let small: Vec<u8> = all_masks().filter(|m| m.count_ones() <= 2).collect();
    let mut cases = 0;
    for blocked in all_masks() {
        // Digits 1 and 2, when blocked, come from a placed ticket's TD.
        let placed_part = blocked & (bit(1) | bit(2));
        let printed_part = blocked & !placed_part;
        for &own in &small {
            let mut t = ticket(TicketKind::Feature, 8, &[], 5);
            t.blocked = mask_to_set(printed_part);
            t.td = mask_to_set(own);
            let original = t.clone();
            let mut state = game_with_ticket(t);
            if placed_part != 0 {
                let mut done = ticket(TicketKind::Architecture, 1, &[], 0);
                done.tasks_done = 1;
                done.td = mask_to_set(placed_part);
                state.team_mut(TeamId::FIRST).module_mut(ModuleId::A).placed.push(done);
            }
            for incur in incur_lists(blocked, own) {
                let mv = Move::Work {
                    module: ModuleId::A,
                    incur: incur.iter().map(|d| digit(*d)).collect(),
                };
                for a in 1..=6 {
                    for b in 1..=6 {
                        let want = oracle(blocked, own, &incur, a, b);
                        // Rewind instead of cloning: only the ticket, the turn and the log move.
                        state.team_mut(TeamId::FIRST).module_mut(ModuleId::A).in_progress = Some(original.clone());
                        state.set_round(0, TeamId::FIRST);
                        let before = state.log().len();
                        state
                            .submit_move_with(TeamId::FIRST, &mv, &mut ScriptedDice::new([roll(a, b)]))
                            .map_err(|r| format!("rejected {mv}: {r}"))?;
                        let after = state
                            .team(TeamId::FIRST)
                            .module(ModuleId::A)
                            .in_progress
                            .clone()
                            .ok_or("ticket vanished")?;
                        let mut want_td = own;
                        if let Some(d) = want.td {
                            want_td |= bit(d);
                        }
                        let incurred: Vec<(u8, bool)> = state.log()[before..]
                            .iter()
                            .filter_map(|e| match &e.event {
                                EventKind::TdIncurred { digit, conscious, .. } => Some((digit.value(), *conscious)),
                                _ => None,
                            })
                            .collect();
                        let want_events: Vec<(u8, bool)> = want.td.map(|d| (d, want.conscious)).into_iter().collect();
                        if after.tasks_done != want.tasks || after.td != mask_to_set(want_td) || incurred != want_events {
                            return Err(format!(
                                "blocked {} own {} incur {incur:?} roll ({a},{b}): tasks {} td {} events {incurred:?}, oracle {want:?}",
                                mask_to_set(blocked),
                                mask_to_set(own),
                                after.tasks_done,
                                after.td
                            ));
                        }
                        cases += 1;
                    }
                }
            }
        }
    }
    Ok(cases)
}

/// Rolls out of 36 that complete at least one task, by the oracle.
pub fn oracle_progress_count(blocked: u8, own_td: u8, incur: &[u8]) -> usize {
    (1..=6)
        .flat_map(|a| (1..=6).map(move |b| (a, b)))
        .filter(|&(a, b)| oracle(blocked, own_td, incur, a, b).tasks > 0)
        .count()
}

pub fn mask(digits: &[u8]) -> u8 {
    digits.iter().fold(0, |m, d| m | bit(*d))
}

fn full_module(kind_users: u32) -> Vec<Ticket> {
    let mut placed = Vec::new();
    let mut arch = ticket(TicketKind::Architecture, 1, &[], 0);
    arch.tasks_done = 1;
    placed.push(arch);
    for _ in 0..3 {
        let mut f = ticket(TicketKind::Feature, 1, &[], kind_users);
        f.tasks_done = 1;
        placed.push(f);
    }
    placed
}

/// Team 0 finishes its last ticket mid-game: the game ends on module
/// completion, scored and logged. Returns the final round on success.
pub fn modules_complete_fixture() -> Result<u32, String> {
    let mut state = fresh_game(21);
    state.set_round(12, TeamId::FIRST);
    let team = state.team_mut(TeamId::FIRST);
    for m in ModuleId::ALL {
        team.module_mut(m).placed = full_module(3);
    }
    let last = team.module_mut(ModuleId::C);
    last.placed.pop();
    let mut t = ticket(TicketKind::Feature, 2, &[], 5);
    t.tasks_done = 1;
    last.in_progress = Some(t);
    team.users_banked = 9 * 3;

    state
        .submit_move_with(TeamId::FIRST, &Move::work(ModuleId::C), &mut ScriptedDice::new([roll(2, 5)]))
        .map_err(|r| r.to_string())?;
    if state.end_reason() != Some(techdebt_core::rules::EndReason::ModulesComplete) {
        return Err(format!("end reason {:?}", state.end_reason()));
    }
    let scores = state.final_score().map_err(|e| e.to_string())?;
    if scores.scores != [32, 0] || scores.winner() != Some(TeamId::FIRST) {
        return Err(format!("scores {scores:?}"));
    }
    Ok(state.round())
}

/// Both teams keep moving until the round limit; the game ends there, not
/// one turn earlier or later. Returns the number of accepted moves.
pub fn round_limit_fixture(max_rounds: u32) -> Result<usize, String> {
    let rules = RulesConfig { max_rounds, td_penalty: 1 };
    let mut state = GameState::new(default_pack(), 4, rules, ["Red", "Blue"]);
    let mut moves = 0;
    while state.phase() == techdebt_core::rules::Phase::AwaitingMove {
        let team = state.active_team();
        // Always the first listed option: start tickets, then work them.
        let mv = techdebt_core::rules::legal_moves(&state).map_err(|e| e.to_string())?[0].clone();
        state
            .submit_move_with(team, &mv, &mut ScriptedDice::new([roll(1, 1)]))
            .map_err(|r| r.to_string())?;
        moves += 1;
        if moves > 10 * max_rounds as usize {
            return Err("game did not end".into());
        }
    }
    let expected = 2 * max_rounds as usize;
    if state.end_reason() != Some(techdebt_core::rules::EndReason::RoundLimit) || moves != expected || state.round() != max_rounds {
        return Err(format!(
            "ended {:?} after {moves} moves in round {}, expected {expected} moves",
            state.end_reason(),
            state.round()
        ));
    }
    Ok(moves)
}

/// Completing every module on the last turn before the limit reports module
/// completion, not the round limit.
pub fn end_precedence_fixture() -> Result<(), String> {
    let rules = RulesConfig { max_rounds: 5, td_penalty: 1 };
    let mut state = GameState::new(default_pack(), 4, rules, ["Red", "Blue"]);
    state.set_round(4, TeamId::SECOND);
    let team = state.team_mut(TeamId::SECOND);
    for m in ModuleId::ALL {
        team.module_mut(m).placed = full_module(2);
    }
    let last = team.module_mut(ModuleId::A);
    last.placed.pop();
    last.in_progress = Some(ticket(TicketKind::Feature, 1, &[], 2));
    state
        .submit_move_with(TeamId::SECOND, &Move::work(ModuleId::A), &mut ScriptedDice::new([roll(3, 4)]))
        .map_err(|r| r.to_string())?;
    match state.end_reason() {
        Some(techdebt_core::rules::EndReason::ModulesComplete) if state.round() == 5 => Ok(()),
        other => Err(format!("{other:?} in round {}", state.round())),
    }
}
