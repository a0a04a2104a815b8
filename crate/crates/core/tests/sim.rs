mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use rand::SeedableRng;
use techdebt_core::aha::AhaTag;
use techdebt_core::content::default_pack;
use techdebt_core::rules::{legal_moves, ModuleId, Move, MoveClass, Phase, TeamId, TicketKind};
use techdebt_core::session::{new_session, ReplayFile, SessionConfig};
use techdebt_core::sim::{
    export_results, parse_results, recompute_from_replays, run_experiment, AlwaysIncur, Balanced,
    ExperimentConfig, ExportFormat, NeverIncur, Policy, PolicyRng, Side, UniformRandom,
};

#[test]
fn self_play_is_even_after_seat_swapping() {
    let config = ExperimentConfig::new(default_pack());
    let result = run_experiment(&Balanced::default(), &Balanced::default(), 2000, 900, &config).unwrap();
    let decisive = (result.a.wins + result.b.wins) as f64;
    let share = result.a.wins as f64 / decisive;
    let sigma = (0.25 / decisive).sqrt();
    assert!((share - 0.5).abs() < 2.0 * sigma, "A won {share:.3} of decisive games (sigma {sigma:.4})");
}

#[test]
fn same_inputs_same_result() {
    let config = ExperimentConfig::new(default_pack());
    let a = run_experiment(&UniformRandom, &NeverIncur, 50, 5, &config).unwrap();
    let b = run_experiment(&UniformRandom, &NeverIncur, 50, 5, &config).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.games.len(), 50);
}

#[test]
fn statistics_recompute_from_stored_replays() {
    let mut config = ExperimentConfig::new(default_pack());
    config.keep_replays = true;
    let result = run_experiment(&AlwaysIncur, &UniformRandom, 40, 70, &config).unwrap();
    let dir = tempfile::tempdir().unwrap();
    result.write_to(dir.path()).unwrap();

    let mut files: Vec<ReplayFile> = std::fs::read_dir(dir.path().join("replays"))
        .unwrap()
        .map(|entry| ReplayFile::read_from(&entry.unwrap().path()).unwrap())
        .collect();
    files.sort_by_key(|f| f.header.seed);
    assert_eq!(files.len(), 40);
    let again = recompute_from_replays(result.meta.clone(), &files);
    assert_eq!(again.a, result.a);
    assert_eq!(again.b, result.b);
    assert_eq!(again.games, result.games);

    // Histogram rows sum to the tag emissions counted straight off the files.
    let mut recount: BTreeMap<AhaTag, u64> = BTreeMap::new();
    for f in &files {
        for e in &f.events {
            for tag in &e.tags {
                *recount.entry(*tag).or_default() += 1;
            }
        }
    }
    for tag in AhaTag::all() {
        let both = result.a.aha[&tag] + result.b.aha[&tag];
        assert_eq!(both, recount.get(&tag).copied().unwrap_or(0), "{tag}");
    }

    let csv = std::fs::read_to_string(dir.path().join("result.csv")).unwrap();
    let mut parsed = parse_results(&csv, ExportFormat::Csv).unwrap();
    parsed.replays = result.replays.clone();
    assert_eq!(parsed, result);
}

#[test]
fn one_game_writes_one_replay() {
    let mut config = ExperimentConfig::new(default_pack());
    config.keep_replays = true;
    let result = run_experiment(&NeverIncur, &AlwaysIncur, 1, 3, &config).unwrap();
    let dir = tempfile::tempdir().unwrap();
    result.write_to(dir.path()).unwrap();
    assert_eq!(std::fs::read_dir(dir.path().join("replays")).unwrap().count(), 1);
    assert!(export_results(&result, ExportFormat::Table).contains("never-incur vs always-incur"));
}

#[test]
fn random_policy_tries_every_move_class() {
    let mut seen = BTreeSet::new();
    let mut decisions = 0;
    let mut seed = 0;
    while decisions < 10_000 {
        let mut state = new_session(&SessionConfig::new(default_pack(), seed)).unwrap();
        let mut rng = PolicyRng::seed_from_u64(seed);
        while state.phase() == Phase::AwaitingMove && decisions < 10_000 {
            let legal = legal_moves(&state).unwrap();
            let mv = UniformRandom.decide(&state, &legal, &mut rng);
            seen.insert(format!("{:?}", mv.class()));
            state.submit_move(state.active_team(), &mv).unwrap();
            decisions += 1;
        }
        seed += 1;
    }
    let all: BTreeSet<String> = [MoveClass::Work, MoveClass::Repay, MoveClass::PlayAction, MoveClass::StartTicket]
        .iter()
        .map(|c| format!("{c:?}"))
        .collect();
    assert_eq!(seen, all);
}

/// Team 0 working a ticket whose every digit but 6 is blocked.
fn blocked_position() -> techdebt_core::rules::GameState {
    let mut t = ticket(TicketKind::Feature, 3, &[1, 2, 3, 4, 5], 5);
    t.tasks_done = 1;
    game_with_ticket(t)
}

#[test]
fn always_incur_offers_every_blocked_digit() {
    let state = blocked_position();
    let legal = legal_moves(&state).unwrap();
    let mut rng = PolicyRng::seed_from_u64(1);
    match AlwaysIncur.decide(&state, &legal, &mut rng) {
        Move::Work { module, incur } => {
            assert_eq!(module, ModuleId::A);
            assert_eq!(incur.len(), 5);
        }
        other => panic!("{other}"),
    }
}

#[test]
fn never_incur_works_without_incurring_or_repays() {
    let mut state = blocked_position();
    let legal = legal_moves(&state).unwrap();
    let mut rng = PolicyRng::seed_from_u64(1);
    assert_eq!(NeverIncur.decide(&state, &legal, &mut rng), Move::work(ModuleId::A));

    // With its own TD blocking the module it pays that back first.
    let mut placed = ticket(TicketKind::Architecture, 1, &[], 0);
    placed.tasks_done = 1;
    placed.td = mask_to_set(mask(&[6]));
    state.team_mut(TeamId::FIRST).module_mut(ModuleId::A).placed.push(placed);
    let legal = legal_moves(&state).unwrap();
    assert!(matches!(NeverIncur.decide(&state, &legal, &mut rng), Move::Repay { .. }));
}

#[test]
fn summaries_line_up_with_games() {
    let config = ExperimentConfig::new(default_pack());
    let r = run_experiment(&Balanced::default(), &AlwaysIncur, 30, 11, &config).unwrap();
    assert_eq!(r.a.wins + r.b.wins + r.draws, 30);
    let mean = r.scores(Side::B).iter().sum::<f64>() / 30.0;
    assert!((mean - r.b.mean_score).abs() < 1e-9);
    assert!(r.games.iter().all(|g| g.rounds <= 60 && g.a.rounds_to_first_ticket <= 61));
}
