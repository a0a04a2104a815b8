//! Whole-game driving: configuration, seeded start, move submission, replay.

mod replay;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aha::AhaTag;
use crate::content::ContentPack;
use crate::rules::{GameState, Move, Rejection, RulesConfig, TeamId};

pub use replay::{replay, ReplayError, ReplayFile, ReplayHeader, REPLAY_FORMAT, REPLAY_FORMAT_VERSION};

pub const MAX_SEATS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Seat {
    Human { name: String },
    Bot { policy: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TeamRoster {
    pub name: String,
    pub seats: Vec<Seat>,
}

impl TeamRoster {
    /// A team of `n` human seats named "<team> player k".
    pub fn humans(name: &str, n: usize) -> Self {
        TeamRoster {
            name: name.to_string(),
            seats: (1..=n)
                .map(|k| Seat::Human {
                    name: format!("{name} player {k}"),
                })
                .collect(),
        }
    }

    pub fn bot(name: &str, policy: &str) -> Self {
        TeamRoster {
            name: name.to_string(),
            seats: vec![Seat::Bot {
                policy: policy.to_string(),
            }],
        }
    }
}

#[derive(Debug, Clone)]
pub struct SessionConfig {
    pub pack: Arc<ContentPack>,
    pub seed: u64,
    pub max_rounds: u32,
    pub td_penalty: u32,
    pub teams: Vec<TeamRoster>,
}

impl SessionConfig {
    /// Pack defaults, two teams of two human seats.
    pub fn new(pack: Arc<ContentPack>, seed: u64) -> Self {
        let defaults = pack.defaults;
        SessionConfig {
            pack,
            seed,
            max_rounds: defaults.max_rounds,
            td_penalty: defaults.td_penalty,
            teams: vec![TeamRoster::humans("Team 1", 2), TeamRoster::humans("Team 2", 2)],
        }
    }

    pub fn rules(&self) -> RulesConfig {
        RulesConfig {
            max_rounds: self.max_rounds,
            td_penalty: self.td_penalty,
        }
    }

    pub fn validate(&self) -> Result<(), SessionError> {
        if self.teams.len() != 2 {
            return Err(SessionError::TeamCount(self.teams.len()));
        }
        for (i, team) in self.teams.iter().enumerate() {
            if team.seats.is_empty() || team.seats.len() > MAX_SEATS {
                return Err(SessionError::SeatCount {
                    team: i,
                    seats: team.seats.len(),
                });
            }
        }
        if self.max_rounds == 0 {
            return Err(SessionError::MaxRounds);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SessionError {
    #[error("exactly two teams required, got {0}")]
    TeamCount(usize),
    #[error("team {team} has {seats} seats; each team needs 1..=4")]
    SeatCount { team: usize, seats: usize },
    #[error("max_rounds must be at least 1")]
    MaxRounds,
}

/// Initial state for a validated configuration.
pub fn new_session(config: &SessionConfig) -> Result<GameState, SessionError> {
    config.validate()?;
    let names = [config.teams[0].name.as_str(), config.teams[1].name.as_str()];
    Ok(GameState::new(
        config.pack.clone(),
        config.seed,
        config.rules(),
        names,
    ))
}

/// Submit a move for `team`. Either the state advances or a rejection comes
/// back and the state is unchanged.
pub fn submit_move(state: &mut GameState, team: TeamId, mv: &Move) -> Result<(), Rejection> {
    state.submit_move(team, mv)
}

/// Count of every aha tag emitted so far, over all registry rows.
pub fn aha_exposure(state: &GameState) -> BTreeMap<AhaTag, u64> {
    exposure_of(state.log().iter().flat_map(|e| e.tags.iter().copied()))
}

/// Exposure restricted to events attributed to one team.
pub fn team_exposure(state: &GameState, team: TeamId) -> BTreeMap<AhaTag, u64> {
    exposure_of(
        state
            .log()
            .iter()
            .filter(|e| e.team == team)
            .flat_map(|e| e.tags.iter().copied()),
    )
}

fn exposure_of(tags: impl Iterator<Item = AhaTag>) -> BTreeMap<AhaTag, u64> {
    let mut counts: BTreeMap<AhaTag, u64> = AhaTag::all().map(|t| (t, 0)).collect();
    for tag in tags {
        *counts.entry(tag).or_default() += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::content::default_pack;

    #[test]
    fn three_teams_rejected() {
        let mut config = SessionConfig::new(default_pack(), 1);
        config.teams.push(TeamRoster::humans("Team 3", 2));
        assert_eq!(new_session(&config).unwrap_err(), SessionError::TeamCount(3));
        assert_eq!(
            SessionError::TeamCount(3).to_string(),
            "exactly two teams required, got 3"
        );
    }

    #[test]
    fn seat_limits() {
        let mut config = SessionConfig::new(default_pack(), 1);
        config.teams[1] = TeamRoster::humans("Big", 5);
        assert!(matches!(new_session(&config), Err(SessionError::SeatCount { team: 1, seats: 5 })));
        config.teams[1] = TeamRoster::humans("Empty", 0);
        assert!(new_session(&config).is_err());
        config.teams[1] = TeamRoster::bot("Solo", "balanced");
        assert!(new_session(&config).is_ok());
    }

    #[test]
    fn fresh_game_has_zero_exposure() {
        let state = new_session(&SessionConfig::new(default_pack(), 3)).unwrap();
        let exposure = aha_exposure(&state);
        assert_eq!(exposure.len(), AhaTag::all().count());
        assert!(exposure.values().all(|v| *v == 0));
    }
}
