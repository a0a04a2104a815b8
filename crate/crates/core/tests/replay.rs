use rand::SeedableRng;
use techdebt_core::content::default_pack;
use techdebt_core::rules::{legal_moves, DiceRoll, EventKind, Phase};
use techdebt_core::session::{new_session, replay, ReplayError, ReplayFile, SessionConfig};
use techdebt_core::sim::{Balanced, Policy, PolicyRng, UniformRandom};

fn recorded_game(seed: u64) -> ReplayFile {
    let config = SessionConfig::new(default_pack(), seed);
    let mut state = new_session(&config).unwrap();
    let mut rng = PolicyRng::seed_from_u64(seed);
    let policies: [&dyn Policy; 2] = [&UniformRandom, &Balanced::default()];
    while state.phase() == Phase::AwaitingMove {
        let legal = legal_moves(&state).unwrap();
        let mv = policies[state.active_team().index()].decide(&state, &legal, &mut rng);
        state.submit_move(state.active_team(), &mv).unwrap();
    }
    ReplayFile::record(&config, &state)
}

#[test]
fn write_read_write_is_byte_identical() {
    let file = recorded_game(31);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("game.jsonl");
    file.write_to(&path).unwrap();
    let back = ReplayFile::read_from(&path).unwrap();
    assert_eq!(back, file);
    assert_eq!(back.to_jsonl(), std::fs::read_to_string(&path).unwrap());
    let state = replay(&back, default_pack()).unwrap();
    assert_eq!(state.log(), &file.events[..]);
}

#[test]
fn tampered_dice_value_is_caught_at_its_event() {
    let mut file = recorded_game(32);
    let index = file
        .events
        .iter()
        .position(|e| matches!(e.event, EventKind::DiceRolled { .. }))
        .unwrap();
    if let EventKind::DiceRolled { roll, .. } = &mut file.events[index].event {
        let face = if roll.first.value() == 6 { 1 } else { roll.first.value() + 1 };
        *roll = DiceRoll::of(face, roll.second.value());
    }
    match replay(&file, default_pack()) {
        Err(ReplayError::Divergence { index: at, .. }) => assert_eq!(at, index),
        other => panic!("{other:?}"),
    }
}

#[test]
fn tampering_at_event_seven_reports_seven() {
    let mut file = recorded_game(33);
    file.events[7].round += 1;
    match replay(&file, default_pack()) {
        Err(ReplayError::Divergence { index, .. }) => assert_eq!(index, 7),
        other => panic!("{other:?}"),
    }
}

#[test]
fn truncated_log_is_a_divergence_not_a_panic() {
    let mut file = recorded_game(34);
    let cut = file.events.iter().rposition(|e| e.event.is_input()).unwrap() + 1;
    file.events.truncate(cut);
    assert!(matches!(replay(&file, default_pack()), Err(ReplayError::Divergence { index, .. }) if index == cut));
}

#[test]
fn header_must_name_the_pack() {
    let mut file = recorded_game(35);
    file.header.pack_version = "9.9.9".into();
    assert!(matches!(replay(&file, default_pack()), Err(ReplayError::PackMismatch { .. })));
}

#[test]
fn malformed_lines_report_their_number() {
    let file = recorded_game(36);
    let mut lines: Vec<String> = file.to_jsonl().lines().map(String::from).collect();
    lines[3] = "{not json".into();
    match ReplayFile::parse(&lines.join("\n")) {
        Err(ReplayError::Parse { line, .. }) => assert_eq!(line, 4),
        other => panic!("{other:?}"),
    }
    let wrong = file.to_jsonl().replacen("techdebt-replay", "other", 1);
    assert!(matches!(ReplayFile::parse(&wrong), Err(ReplayError::Format { .. })));
}

#[test]
fn header_line_is_stable() {
    let file = recorded_game(1);
    let header = file.header_line();
    assert!(header.starts_with(r#"{"format":"techdebt-replay","format_version":1,"pack_name":"default","pack_version":"1.0.0","seed":1,"max_rounds":60,"td_penalty":2,"teams":["#));
}
