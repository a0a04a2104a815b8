#![allow(dead_code)]

use techdebt_core::rules::Move;
use techdebt_core::session::TeamRoster;
use techdebt_core::{default_pack, new_session, GameEvent, ReplayFile, SessionConfig};
use techdebt_service::{ClientView, CreateSession, GameStore, SeatToken, SessionHost};

/// In-memory host without the wall clock, so tests control time.
pub fn host() -> SessionHost {
    SessionHost::new(GameStore::in_memory()).with_default_clock(None)
}

pub fn request(seed: u64, max_rounds: u32) -> CreateSession {
    CreateSession {
        seed: Some(seed),
        max_rounds: Some(max_rounds),
        ..CreateSession::default()
    }
}

/// One human seat on team 0 against a bot team.
pub fn versus_bot(seed: u64, max_rounds: u32, policy: &str) -> CreateSession {
    CreateSession {
        teams: Some(vec![TeamRoster::humans("Humans", 1), TeamRoster::bot("Bots", policy)]),
        ..request(seed, max_rounds)
    }
}

/// Create a session and join every human seat.
pub fn started(host: &SessionHost, req: &CreateSession) -> (String, Vec<SeatToken>) {
    let created = host.create_session(req).unwrap();
    for t in &created.tokens {
        host.join(&created.session_id, &t.token).unwrap();
    }
    (created.session_id, created.tokens)
}

/// First listed option, with card choices taken from the view's prompts.
pub fn choose(view: &ClientView) -> Option<Move> {
    let mv = view.legal_moves.first()?.clone();
    Some(match mv {
        Move::PlayAction { card_id, .. } => {
            let bindings = view
                .card_prompts
                .iter()
                .find(|p| p.card_id == card_id)
                .map(|p| p.suggested)
                .unwrap_or_default();
            Move::PlayAction { card_id, bindings }
        }
        other => other,
    })
}

/// Submit `choose` for whichever team is to move until `n` moves are in or
/// the game ends. Returns the number of moves made.
pub fn play(host: &SessionHost, id: &str, tokens: &[SeatToken], n: usize) -> usize {
    for made in 0..n {
        let view = host.view(id, None).unwrap();
        let Some(token) = tokens.iter().find(|t| t.team == view.active_team) else {
            return made;
        };
        let view = host.view(id, Some(&token.token)).unwrap();
        let Some(mv) = choose(&view) else {
            return made;
        };
        host.submit(id, &token.token, &mv, None).unwrap();
    }
    n
}

/// A replay file for a default-config session with `events` as its log.
pub fn replay_of(seed: u64, max_rounds: u32, teams: Option<Vec<TeamRoster>>, events: Vec<GameEvent>) -> ReplayFile {
    let mut config = SessionConfig::new(default_pack(), seed);
    config.max_rounds = max_rounds;
    if let Some(teams) = teams {
        config.teams = teams;
    }
    let mut file = ReplayFile::record(&config, &new_session(&config).unwrap());
    file.events = events;
    file
}
