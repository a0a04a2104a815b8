//! Bot policies: decision functions from the full game state to a legal move.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::rules::{
    auto_bind, effective_blocked, resolve_work, Bindings, Card, DiceRoll, Digit, DigitSet,
    EffectPrimitive, GameState, ModuleId, Move, RepaymentTarget, TeamState, TicketKind, TicketRef,
};

/// Generator handed to a policy; separate from the game's own stream.
pub type PolicyRng = ChaCha8Rng;

pub trait Policy: Send + Sync {
    fn name(&self) -> &str;

    /// Pick one of `legal` (free parameters may be filled in).
    fn decide(&self, state: &GameState, legal: &[Move], rng: &mut PolicyRng) -> Move;

    /// Choices for a card about to be played.
    fn bind(&self, team: &TeamState, card: &Card) -> Bindings {
        auto_bind(team, card)
    }
}

/// Names accepted by [`policy_by_name`].
pub const POLICY_NAMES: [&str; 4] = ["never-incur", "always-incur", "balanced", "random"];

pub fn builtin_policies() -> Vec<Box<dyn Policy>> {
    vec![
        Box::new(NeverIncur),
        Box::new(AlwaysIncur),
        Box::new(Balanced::default()),
        Box::new(UniformRandom),
    ]
}

pub fn policy_by_name(name: &str) -> Option<Box<dyn Policy>> {
    builtin_policies().into_iter().find(|p| p.name() == name)
}

/// Chance that one work roll completes at least one task.
pub fn progress_probability(blocked: DigitSet, own_td: DigitSet, incur: &[Digit]) -> f64 {
    let hits = DiceRoll::all()
        .filter(|r| resolve_work(blocked, own_td, incur, *r).tasks > 0)
        .count();
    hits as f64 / 36.0
}

/// Every digit this ticket could still take a conscious tile on.
fn incur_all(team: &TeamState, module: ModuleId) -> Vec<Digit> {
    let blocked = effective_blocked(team, module).unwrap_or_default();
    let own = team
        .module(module)
        .in_progress
        .as_ref()
        .map(|t| t.td)
        .unwrap_or_default();
    blocked.difference(own).iter().collect()
}

fn work_odds(team: &TeamState, module: ModuleId, incur: &[Digit]) -> f64 {
    let column = team.module(module);
    match (&column.in_progress, effective_blocked(team, module)) {
        (Some(t), Ok(blocked)) => progress_probability(blocked, t.td, incur),
        _ => 0.0,
    }
}

/// Best Work option among the legal ones.
fn best_work(team: &TeamState, legal: &[Move], incurring: bool) -> Option<Move> {
    legal
        .iter()
        .filter_map(|m| match m {
            Move::Work { module, .. } => Some(*module),
            _ => None,
        })
        .map(|module| {
            let incur = if incurring { incur_all(team, module) } else { Vec::new() };
            let odds = work_odds(team, module, &incur);
            (odds, module, incur)
        })
        .max_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)))
        .map(|(_, module, incur)| Move::Work { module, incur })
}

/// Start the next ticket where it will be least hampered: fewest TD tiles on
/// the module's placed tickets, then the module with more progress, so one
/// module is finished before another is opened.
fn best_start(team: &TeamState, legal: &[Move]) -> Option<Move> {
    legal
        .iter()
        .filter_map(|m| match m {
            Move::StartTicket { module } => Some(*module),
            _ => None,
        })
        .min_by_key(|m| {
            let c = team.module(*m);
            (c.placed_td().len(), usize::MAX - c.placed.len(), *m)
        })
        .map(|module| Move::StartTicket { module })
}

/// A tile on a placed ticket that blocks the module's current work, easiest
/// (feature) first.
fn blocking_tile(team: &TeamState, module: ModuleId) -> Option<RepaymentTarget> {
    let column = team.module(module);
    let mut tiles: Vec<(TicketKind, RepaymentTarget)> = column
        .placed
        .iter()
        .enumerate()
        .flat_map(|(i, t)| {
            t.td.iter().map(move |digit| {
                (
                    t.kind,
                    RepaymentTarget {
                        module,
                        ticket: TicketRef::Placed(i),
                        digit,
                    },
                )
            })
        })
        .collect();
    // Feature sorts after Architecture; reverse so features come first.
    tiles.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    tiles.first().map(|(_, t)| *t)
}

/// Would playing this card do something useful right now?
fn card_helps(team: &TeamState, card: &Card, incurring: bool) -> bool {
    let has_td = team.td_count() > 0;
    let working = team.board.iter().any(|c| c.in_progress.is_some());
    card.effect.iter().all(|p| match p {
        EffectPrimitive::AddTdChosenDigit => incurring && working,
        EffectPrimitive::AddTdRandomDigit { .. } | EffectPrimitive::SkipNextTurn => false,
        EffectPrimitive::BlockDigitForRounds { .. } => false,
        EffectPrimitive::RemoveTd { .. } | EffectPrimitive::FreeRepaymentAttempt => has_td,
        EffectPrimitive::CompleteOneTask { .. } => working,
        EffectPrimitive::DoubleNextTicketUsers => team
            .board
            .iter()
            .any(|c| c.in_progress.as_ref().is_some_and(|t| t.kind == TicketKind::Feature)),
        EffectPrimitive::RevealOpponentTd => true,
    })
}

fn playable_card(
    policy: &dyn Policy,
    team: &TeamState,
    legal: &[Move],
    incurring: bool,
) -> Option<Move> {
    legal.iter().find_map(|m| match m {
        Move::PlayAction { card_id, .. } => {
            let card = team.hand.iter().find(|c| &c.id == card_id)?;
            card_helps(team, card, incurring).then(|| Move::PlayAction {
                card_id: card_id.clone(),
                bindings: policy.bind(team, card),
            })
        }
        _ => None,
    })
}

fn fallback(legal: &[Move]) -> Move {
    legal.first().cloned().expect("legal move list is never empty mid-game")
}

/// Declines all conscious incurrence. Repays TD that blocks its current
/// work when the odds of progress drop below one half.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeverIncur;

impl Policy for NeverIncur {
    fn name(&self) -> &str {
        "never-incur"
    }

    fn decide(&self, state: &GameState, legal: &[Move], _rng: &mut PolicyRng) -> Move {
        let team = state.team(state.active_team());
        if let Some(m) = playable_card(self, team, legal, false) {
            return m;
        }
        if let Some(Move::Work { module, incur }) = best_work(team, legal, false) {
            if work_odds(team, module, &[]) < 0.5 {
                if let Some(target) = blocking_tile(team, module) {
                    return Move::Repay { target };
                }
            }
            return Move::Work { module, incur };
        }
        best_start(team, legal).unwrap_or_else(|| fallback(legal))
    }
}

/// Incurs whenever the rules allow it, never repays.
#[derive(Debug, Clone, Copy, Default)]
pub struct AlwaysIncur;

impl Policy for AlwaysIncur {
    fn name(&self) -> &str {
        "always-incur"
    }

    fn decide(&self, state: &GameState, legal: &[Move], _rng: &mut PolicyRng) -> Move {
        let team = state.team(state.active_team());
        if let Some(m) = playable_card(self, team, legal, true) {
            return m;
        }
        best_work(team, legal, true)
            .or_else(|| best_start(team, legal))
            .unwrap_or_else(|| fallback(legal))
    }
}

/// Incurs while a module is still fairly clean, and repays once the TD on a
/// module's placed tickets blocks `repay_at` or more digits.
#[derive(Debug, Clone, Copy)]
pub struct Balanced {
    pub repay_at: usize,
}

impl Default for Balanced {
    fn default() -> Self {
        Balanced { repay_at: 3 }
    }
}

impl Policy for Balanced {
    fn name(&self) -> &str {
        "balanced"
    }

    fn decide(&self, state: &GameState, legal: &[Move], _rng: &mut PolicyRng) -> Move {
        let team = state.team(state.active_team());
        if let Some(m) = playable_card(self, team, legal, true) {
            return m;
        }
        for column in &team.board {
            if column.in_progress.is_some() && column.placed_td().len() >= self.repay_at {
                if let Some(target) = blocking_tile(team, column.id) {
                    return Move::Repay { target };
                }
            }
        }
        best_work(team, legal, true)
            .or_else(|| best_start(team, legal))
            .unwrap_or_else(|| fallback(legal))
    }
}

/// Uniform over the legal list; free parameters chosen at random too.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformRandom;

impl Policy for UniformRandom {
    fn name(&self) -> &str {
        "random"
    }

    fn decide(&self, state: &GameState, legal: &[Move], rng: &mut PolicyRng) -> Move {
        let team = state.team(state.active_team());
        let choice = legal.choose(rng).cloned().unwrap_or_else(|| fallback(legal));
        match choice {
            Move::Work { module, .. } => {
                let mut incur: Vec<Digit> = incur_all(team, module)
                    .into_iter()
                    .filter(|_| rng.gen_bool(0.5))
                    .collect();
                incur.shuffle(rng);
                Move::Work { module, incur }
            }
            Move::PlayAction { card_id, .. } => {
                let bindings = team
                    .hand
                    .iter()
                    .find(|c| c.id == card_id)
                    .map(|c| self.bind(team, c))
                    .unwrap_or_default();
                Move::PlayAction { card_id, bindings }
            }
            other => other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[u8]) -> DigitSet {
        DigitSet::try_from(v.to_vec()).unwrap()
    }

    #[test]
    fn progress_odds_match_enumeration() {
        assert_eq!(progress_probability(DigitSet::EMPTY, DigitSet::EMPTY, &[]), 1.0);
        assert!((progress_probability(set(&[1, 2, 3, 4, 5]), DigitSet::EMPTY, &[]) - 11.0 / 36.0).abs() < 1e-12);
    }

    #[test]
    fn names_resolve() {
        for name in POLICY_NAMES {
            assert_eq!(policy_by_name(name).unwrap().name(), name);
        }
        assert!(policy_by_name("greedy").is_none());
    }
}
