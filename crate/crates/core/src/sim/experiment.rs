//! Head-to-head Monte Carlo runs between two policies.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;
use std::sync::Arc;

use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::export::{export_results, ExportFormat};
use super::policy::{Policy, PolicyRng};
use super::stats::{mean, stddev};
use crate::aha::AhaTag;
use crate::content::ContentPack;
use crate::rules::{legal_moves, EndReason, EventKind, GameEvent, GameState, Phase, TeamId};
use crate::session::{new_session, ReplayFile, SessionConfig, SessionError, TeamRoster};

/// Mixed into the game seed so the policies' stream differs from the dice.
const POLICY_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("an experiment needs at least one game")]
    NoGames,
    #[error(transparent)]
    Config(#[from] SessionError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Which of the two policies in a pairing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::A => "a",
            Side::B => "b",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    A,
    B,
    Draw,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub pack: Arc<ContentPack>,
    pub max_rounds: u32,
    pub td_penalty: u32,
    /// Keep every game's replay in the result (memory grows with n).
    pub keep_replays: bool,
}

impl ExperimentConfig {
    pub fn new(pack: Arc<ContentPack>) -> Self {
        let defaults = pack.defaults;
        ExperimentConfig {
            pack,
            max_rounds: defaults.max_rounds,
            td_penalty: defaults.td_penalty,
            keep_replays: false,
        }
    }

    fn session(&self, seed: u64, names: [&str; 2]) -> SessionConfig {
        SessionConfig {
            pack: self.pack.clone(),
            seed,
            max_rounds: self.max_rounds,
            td_penalty: self.td_penalty,
            teams: names.iter().map(|p| TeamRoster::bot(p, p)).collect(),
        }
    }
}

/// One side's numbers from one game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideRecord {
    pub score: i64,
    pub unrepaid_td: u32,
    /// Rounds played up to and including the one in which the side completed
    /// its first ticket; `max_rounds + 1` if it never did.
    pub rounds_to_first_ticket: u32,
    pub tag_emissions: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameRecord {
    pub seed: u64,
    /// The team policy A sat at.
    pub a_team: TeamId,
    pub rounds: u32,
    pub end_reason: EndReason,
    pub outcome: Outcome,
    pub a: SideRecord,
    pub b: SideRecord,
    /// Distinct aha tags emitted in the whole game.
    pub distinct_tags: u32,
}

impl GameRecord {
    pub fn side(&self, side: Side) -> &SideRecord {
        match side {
            Side::A => &self.a,
            Side::B => &self.b,
        }
    }
}

/// A record plus the per-side tag counts behind it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameTally {
    pub record: GameRecord,
    pub aha_a: BTreeMap<AhaTag, u64>,
    pub aha_b: BTreeMap<AhaTag, u64>,
}

/// Everything a record holds, read back out of a finished game's log.
/// Returns `None` if the log has no end.
pub fn tally_log(seed: u64, a_team: TeamId, max_rounds: u32, log: &[GameEvent]) -> Option<GameTally> {
    let mut score = [0i64; 2];
    let mut unrepaid = [0u32; 2];
    let mut first = [None::<u32>; 2];
    let mut hist = [BTreeMap::new(), BTreeMap::new()];
    let mut ended = None;
    for e in log {
        let t = e.team.index();
        for tag in &e.tags {
            *hist[t].entry(*tag).or_insert(0u64) += 1;
        }
        match &e.event {
            EventKind::TicketCompleted { .. } if first[t].is_none() => first[t] = Some(e.round + 1),
            EventKind::ScoreTallied {
                score: s,
                unrepaid_td,
                ..
            } => {
                score[t] = *s;
                unrepaid[t] = *unrepaid_td;
            }
            EventKind::GameEnded { reason, winner } => ended = Some((e.round, *reason, *winner)),
            _ => {}
        }
    }
    let (round, end_reason, winner) = ended?;
    let a = a_team.index();
    let b = 1 - a;
    let side = |t: usize, hist: &BTreeMap<AhaTag, u64>| SideRecord {
        score: score[t],
        unrepaid_td: unrepaid[t],
        rounds_to_first_ticket: first[t].unwrap_or(max_rounds + 1),
        tag_emissions: hist.values().sum(),
    };
    let outcome = match winner {
        None => Outcome::Draw,
        Some(w) if w == a_team => Outcome::A,
        Some(_) => Outcome::B,
    };
    let distinct = hist[0].keys().chain(hist[1].keys()).collect::<std::collections::BTreeSet<_>>();
    Some(GameTally {
        record: GameRecord {
            seed,
            a_team,
            // A game cut at the start of round r has played r rounds; one that
            // ended mid-round has played into round r + 1.
            rounds: if end_reason == EndReason::RoundLimit { round } else { round + 1 },
            end_reason,
            outcome,
            a: side(a, &hist[a]),
            b: side(b, &hist[b]),
            distinct_tags: distinct.len() as u32,
        },
        aha_a: hist[a].clone(),
        aha_b: hist[b].clone(),
    })
}

/// Play one bot-vs-bot game to the end. Panics if a policy returns a move
/// the engine rejects.
pub fn play_game(config: &SessionConfig, policies: [&dyn Policy; 2]) -> GameState {
    let mut state = new_session(config).expect("validated session config");
    let mut rng = PolicyRng::seed_from_u64(config.seed ^ POLICY_STREAM);
    while state.phase() != Phase::Finished {
        let team = state.active_team();
        let legal = legal_moves(&state).expect("game in progress");
        let mv = policies[team.index()].decide(&state, &legal, &mut rng);
        assert!(
            legal.iter().any(|l| l.same_option(&mv)),
            "policy {} chose {mv}, not among the legal options",
            policies[team.index()].name()
        );
        if let Err(rejection) = state.submit_move(team, &mv) {
            panic!(
                "policy {} made an illegal move {mv} (seed {}): {rejection}",
                policies[team.index()].name(),
                config.seed
            );
        }
    }
    state
}

/// Aggregate statistics for one side of a pairing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicySummary {
    pub policy: String,
    pub games: u64,
    pub wins: u64,
    pub win_rate: f64,
    pub mean_score: f64,
    pub std_score: f64,
    pub mean_unrepaid_td: f64,
    pub mean_rounds_to_first_ticket: f64,
    pub std_rounds_to_first_ticket: f64,
    /// Emissions per registry row, all rows present.
    pub aha: BTreeMap<AhaTag, u64>,
}

impl PolicySummary {
    fn from_games(policy: &str, side: Side, games: &[GameRecord], aha: BTreeMap<AhaTag, u64>) -> Self {
        let pick = |f: fn(&SideRecord) -> f64| -> Vec<f64> {
            games.iter().map(|g| f(g.side(side))).collect()
        };
        let scores = pick(|s| s.score as f64);
        let first = pick(|s| f64::from(s.rounds_to_first_ticket));
        let won = match side {
            Side::A => Outcome::A,
            Side::B => Outcome::B,
        };
        let wins = games.iter().filter(|g| g.outcome == won).count() as u64;
        PolicySummary {
            policy: policy.to_string(),
            games: games.len() as u64,
            wins,
            win_rate: wins as f64 / games.len() as f64,
            mean_score: mean(&scores),
            std_score: stddev(&scores),
            mean_unrepaid_td: mean(&pick(|s| f64::from(s.unrepaid_td))),
            mean_rounds_to_first_ticket: mean(&first),
            std_rounds_to_first_ticket: stddev(&first),
            aha,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentMeta {
    pub policy_a: String,
    pub policy_b: String,
    pub n: u64,
    pub base_seed: u64,
    pub pack_name: String,
    pub pack_version: String,
    pub max_rounds: u32,
    pub td_penalty: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub meta: ExperimentMeta,
    pub a: PolicySummary,
    pub b: PolicySummary,
    pub draws: u64,
    /// One record per game, in seed order.
    pub games: Vec<GameRecord>,
    #[serde(skip)]
    pub replays: Vec<ReplayFile>,
}

impl ExperimentResult {
    pub fn summary(&self, side: Side) -> &PolicySummary {
        match side {
            Side::A => &self.a,
            Side::B => &self.b,
        }
    }

    pub fn scores(&self, side: Side) -> Vec<f64> {
        self.games.iter().map(|g| g.side(side).score as f64).collect()
    }

    pub fn rounds_to_first_ticket(&self, side: Side) -> Vec<f64> {
        self.games
            .iter()
            .map(|g| f64::from(g.side(side).rounds_to_first_ticket))
            .collect()
    }

    /// Tags seen in at least one game.
    pub fn distinct_tags(&self) -> usize {
        self.a
            .aha
            .iter()
            .zip(&self.b.aha)
            .filter(|((_, x), (_, y))| **x + **y > 0)
            .count()
    }

    /// Writes `result.json`, `result.csv` and, if kept, one
    /// `replays/game-<seed>.jsonl` per game.
    pub fn write_to(&self, dir: &Path) -> Result<(), SimError> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("result.json"), export_results(self, ExportFormat::Json))?;
        fs::write(dir.join("result.csv"), export_results(self, ExportFormat::Csv))?;
        if !self.replays.is_empty() {
            let replays = dir.join("replays");
            fs::create_dir_all(&replays)?;
            for file in &self.replays {
                let path = replays.join(format!("game-{}.jsonl", file.header.seed));
                file.write_to(&path).map_err(|e| match e {
                    crate::session::ReplayError::Io(io) => SimError::Io(io),
                    other => SimError::Io(io::Error::other(other.to_string())),
                })?;
            }
        }
        Ok(())
    }
}

fn merge(into: &mut BTreeMap<AhaTag, u64>, from: &BTreeMap<AhaTag, u64>) {
    for (tag, n) in from {
        *into.entry(*tag).or_insert(0) += n;
    }
}

fn empty_histogram() -> BTreeMap<AhaTag, u64> {
    AhaTag::all().map(|t| (t, 0)).collect()
}

/// Build a result from per-game tallies (in any order).
pub fn aggregate(meta: ExperimentMeta, mut tallies: Vec<GameTally>) -> ExperimentResult {
    tallies.sort_by_key(|t| t.record.seed);
    let mut aha_a = empty_histogram();
    let mut aha_b = empty_histogram();
    for t in &tallies {
        merge(&mut aha_a, &t.aha_a);
        merge(&mut aha_b, &t.aha_b);
    }
    let games: Vec<GameRecord> = tallies.into_iter().map(|t| t.record).collect();
    ExperimentResult {
        a: PolicySummary::from_games(&meta.policy_a, Side::A, &games, aha_a),
        b: PolicySummary::from_games(&meta.policy_b, Side::B, &games, aha_b),
        draws: games.iter().filter(|g| g.outcome == Outcome::Draw).count() as u64,
        meta,
        games,
        replays: Vec::new(),
    }
}

/// Play `n` games seeded `base_seed..base_seed + n`. Policy A takes team 0
/// in even-numbered games and team 1 in odd ones.
pub fn run_experiment(
    policy_a: &dyn Policy,
    policy_b: &dyn Policy,
    n: u64,
    base_seed: u64,
    config: &ExperimentConfig,
) -> Result<ExperimentResult, SimError> {
    if n == 0 {
        return Err(SimError::NoGames);
    }
    config.session(base_seed, ["a", "b"]).validate()?;

    let outcomes: Vec<(GameTally, Option<ReplayFile>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let seed = base_seed.wrapping_add(i);
            let a_team = if i % 2 == 0 { TeamId::FIRST } else { TeamId::SECOND };
            let (seats, names) = if a_team == TeamId::FIRST {
                ([policy_a, policy_b], [policy_a.name(), policy_b.name()])
            } else {
                ([policy_b, policy_a], [policy_b.name(), policy_a.name()])
            };
            let session = config.session(seed, names);
            let state = play_game(&session, seats);
            let tally = tally_log(seed, a_team, config.max_rounds, state.log())
                .expect("finished game has an end event");
            let replay = config
                .keep_replays
                .then(|| ReplayFile::record(&session, &state));
            (tally, replay)
        })
        .collect();

    let meta = ExperimentMeta {
        policy_a: policy_a.name().to_string(),
        policy_b: policy_b.name().to_string(),
        n,
        base_seed,
        pack_name: config.pack.name.clone(),
        pack_version: config.pack.version.clone(),
        max_rounds: config.max_rounds,
        td_penalty: config.td_penalty,
    };
    let (tallies, replays): (Vec<_>, Vec<_>) = outcomes.into_iter().unzip();
    let mut result = aggregate(meta, tallies);
    result.replays = replays.into_iter().flatten().collect();
    Ok(result)
}

/// Recompute a result from replay files alone. Each game's `a_team` follows
/// from its seed by the seat alternation rule.
pub fn recompute_from_replays(meta: ExperimentMeta, replays: &[ReplayFile]) -> ExperimentResult {
    let tallies = replays
        .iter()
        .map(|r| {
            let seed = r.header.seed;
            let i = seed.wrapping_sub(meta.base_seed);
            let a_team = if i % 2 == 0 { TeamId::FIRST } else { TeamId::SECOND };
            tally_log(seed, a_team, r.header.max_rounds, &r.events).expect("replay of a finished game")
        })
        .collect();
    aggregate(meta, tallies)
}
