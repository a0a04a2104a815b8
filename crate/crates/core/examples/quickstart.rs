// Start a seeded game, make a few moves by hand and read the log.
//
//     cargo run -p techdebt-core --example quickstart

use std::error::Error;

use techdebt_core::rules::{legal_moves, ModuleId, Move, TeamId};
use techdebt_core::{default_pack, new_session, SessionConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let config = SessionConfig::new(default_pack(), 2024);
    let mut state = new_session(&config)?;

    println!("options for {}: {:?}", state.active_team(), legal_moves(&state)?);
    state.submit_move(TeamId::FIRST, &Move::StartTicket { module: ModuleId::A })?;
    state.submit_move(TeamId::SECOND, &Move::StartTicket { module: ModuleId::B })?;
    for _ in 0..3 {
        state.submit_move(TeamId::FIRST, &Move::work(ModuleId::A))?;
        state.submit_move(TeamId::SECOND, &Move::work(ModuleId::B))?;
    }

    // Out of turn: rejected, nothing changes.
    let rejection = state.submit_move(TeamId::SECOND, &Move::work(ModuleId::B)).unwrap_err();
    println!("rejected: {rejection}");

    for event in state.log() {
        let tags: Vec<String> = event.tags.iter().map(ToString::to_string).collect();
        println!("#{:<3} round {:<2} {} {:<16} {}", event.seq, event.round, event.team, event.event.name(), tags.join(" "));
    }
    let score = state.provisional_score();
    println!("provisional score {:?}, unrepaid TD {:?}", score.scores, score.unrepaid_td);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
