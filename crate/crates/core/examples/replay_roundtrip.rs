// Record a bot game to a JSON Lines replay, replay it, and watch a tampered
// copy get caught.
//
//     cargo run -p techdebt-core --example replay_roundtrip

use std::error::Error;

use techdebt_core::rules::EventKind;
use techdebt_core::session::TeamRoster;
use techdebt_core::sim::{play_game, AlwaysIncur, Balanced};
use techdebt_core::{default_pack, replay, ReplayFile, SessionConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut config = SessionConfig::new(default_pack(), 99);
    config.teams = vec![TeamRoster::bot("Hasty", "always-incur"), TeamRoster::bot("Careful", "balanced")];
    let state = play_game(&config, [&AlwaysIncur, &Balanced::default()]);
    let file = ReplayFile::record(&config, &state);

    let dir = std::env::temp_dir().join("techdebt-replay-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("game-99.jsonl");
    file.write_to(&path)?;
    println!("wrote {} events to {}", file.events.len(), path.display());
    println!("header: {}", file.header_line());

    let back = ReplayFile::read_from(&path)?;
    let rerun = replay(&back, default_pack())?;
    println!("replayed: {} events, identical = {}", rerun.log().len(), rerun.log() == state.log());
    println!("final score {:?}", rerun.final_score()?.scores);

    let mut forged = back.clone();
    let index = forged
        .events
        .iter()
        .position(|e| matches!(e.event, EventKind::DiceRolled { .. }))
        .ok_or("no dice in the log")?;
    forged.events[index].round += 1;
    match replay(&forged, default_pack()) {
        Err(e) => println!("tampered copy: {e}"),
        Ok(_) => return Err("tampered replay was accepted".into()),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
