//! Acceptance gate: one line per criterion, nonzero exit if any fails.
//!
//!     cargo test -p techdebt-core --test acceptance

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use techdebt_core::content::{coverage_report, default_pack};
use techdebt_core::rules::{
    legal_moves, repay_succeeds, Bindings, Dice, DiceRoll, Digit, GameRng, GameState, ModuleId,
    Move, Phase, RepaymentTarget, TeamId, TicketKind, TicketRef,
};
use techdebt_core::session::{new_session, replay, ReplayFile, SessionConfig, TeamRoster};
use techdebt_core::sim::stats::{bootstrap_less, BOOTSTRAP_RESAMPLES};
use techdebt_core::sim::{
    run_experiment, AlwaysIncur, Balanced, ExperimentConfig, NeverIncur, Policy, PolicyRng, Side,
    UniformRandom,
};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, budget: Duration, what: &str) -> Result<(), String> {
    if elapsed <= budget {
        Ok(())
    } else {
        Err(format!("{what} took {elapsed:.2?}, budget {budget:?}"))
    }
}

fn dice_oracle() -> Outcome {
    let start = Instant::now();
    let cases = check_resolve_work()?;
    let exhaustive = start.elapsed();
    within(exhaustive, Duration::from_secs(1), "exhaustive rule table")?;
    let engine_cases = check_apply_work()?;
    let blocked = mask(&[1, 2, 3, 4, 5]);
    let hits = oracle_progress_count(blocked, 0, &[]);
    let p = techdebt_core::sim::progress_probability(mask_to_set(blocked), Default::default(), &[]);
    check(
        hits == 11 && p == 11.0 / 36.0,
        format!(
            "{cases} rule-table cases in {exhaustive:.2?}, {engine_cases} engine moves; blocked {{1..5}} progresses on {hits}/36 rolls (engine {p:.4})"
        ),
    )
}

fn repayment_probabilities() -> Outcome {
    let start = Instant::now();
    let n = 100_000;
    let mut rng = GameRng::seeded(2024);
    let mut report = Vec::new();
    let mut ok = true;
    for (kind, exact) in [(TicketKind::Feature, 27.0 / 36.0), (TicketKind::Architecture, 20.0 / 36.0)] {
        let enumerated = DiceRoll::all().filter(|r| repay_succeeds(kind, *r)).count() as f64 / 36.0;
        let hits = (0..n).filter(|_| repay_succeeds(kind, rng.roll())).count();
        let mc = hits as f64 / n as f64;
        ok &= enumerated == exact && (mc - exact).abs() <= 0.01;
        report.push(format!("{kind:?} {mc:.4} (exact {exact:.4})"));
    }
    within(start.elapsed(), Duration::from_secs(10), "repayment Monte Carlo")?;
    check(ok, format!("n = {n}: {}", report.join(", ")))
}

fn short_and_long_term() -> Outcome {
    let start = Instant::now();
    let n = 10_000;
    let config = ExperimentConfig::new(default_pack());
    let fast = run_experiment(&AlwaysIncur, &NeverIncur, n, 1, &config).map_err(|e| e.to_string())?;
    let p_fast = bootstrap_less(
        &fast.rounds_to_first_ticket(Side::A),
        &fast.rounds_to_first_ticket(Side::B),
        BOOTSTRAP_RESAMPLES,
        11,
    );
    let long = run_experiment(&AlwaysIncur, &Balanced::default(), n, 1, &config).map_err(|e| e.to_string())?;
    let p_long = bootstrap_less(&long.scores(Side::A), &long.scores(Side::B), BOOTSTRAP_RESAMPLES, 12);
    within(start.elapsed(), Duration::from_secs(300), "policy experiments")?;
    check(
        p_fast >= 0.99
            && p_long >= 0.99
            && fast.a.mean_rounds_to_first_ticket < fast.b.mean_rounds_to_first_ticket
            && long.a.mean_score < long.b.mean_score,
        format!(
            "n = {n}: first ticket always-incur {:.3} < never-incur {:.3} (confidence {p_fast:.4}); final score always-incur {:.3} < balanced {:.3} (confidence {p_long:.4}); {:.1?}",
            fast.a.mean_rounds_to_first_ticket,
            fast.b.mean_rounds_to_first_ticket,
            long.a.mean_score,
            long.b.mean_score,
            start.elapsed()
        ),
    )
}

fn aha_coverage() -> Outcome {
    let report = coverage_report(&default_pack());
    let uncovered: Vec<String> = report.uncovered().map(|t| t.to_string()).collect();
    if !uncovered.is_empty() {
        return Err(format!("uncovered rows: {}", uncovered.join(", ")));
    }
    let config = ExperimentConfig::new(default_pack());
    let result = run_experiment(&UniformRandom, &Balanced::default(), 1000, 500, &config).map_err(|e| e.to_string())?;
    let distinct = result.distinct_tags();
    let per_game = result.games.iter().map(|g| f64::from(g.distinct_tags)).sum::<f64>() / result.games.len() as f64;
    check(
        distinct >= 25,
        format!(
            "all {} rows covered by the default pack; 1000 games emitted {distinct} distinct tags ({per_game:.1} per game)",
            report.rows.len()
        ),
    )
}

/// Any move shape, legal or not, including moves for the wrong team.
fn random_candidate(state: &GameState, rng: &mut ChaCha8Rng) -> (TeamId, Move) {
    let team = if rng.gen_bool(0.9) { state.active_team() } else { state.active_team().other() };
    let module = ModuleId::ALL[rng.gen_range(0..3)];
    let d = |rng: &mut ChaCha8Rng| Digit::ALL[rng.gen_range(0..6)];
    let mv = match rng.gen_range(0..4) {
        0 => Move::Work {
            module,
            incur: (0..rng.gen_range(0..3)).map(|_| d(rng)).collect(),
        },
        1 => Move::Repay {
            target: RepaymentTarget {
                module,
                ticket: if rng.gen_bool(0.2) { TicketRef::InProgress } else { TicketRef::Placed(rng.gen_range(0..4)) },
                digit: d(rng),
            },
        },
        2 => Move::StartTicket { module },
        _ => {
            let pack = state.pack();
            let ids: Vec<&str> = pack.cards().map(|c| c.id.as_str()).collect();
            Move::PlayAction {
                card_id: ids[rng.gen_range(0..ids.len())].to_string(),
                bindings: Bindings {
                    module: rng.gen_bool(0.7).then_some(module),
                    ticket: rng.gen_bool(0.5).then(|| TicketRef::Placed(rng.gen_range(0..4))),
                    digit: rng.gen_bool(0.7).then(|| d(rng)),
                },
            }
        }
    };
    (team, mv)
}

/// Every accepted move must have been among the options and leave a
/// consistent log; every rejected one must leave the state untouched.
fn fuzz_game(seed: u64) -> Result<(SessionConfig, GameState, usize), String> {
    let mut config = SessionConfig::new(default_pack(), seed);
    config.teams = vec![TeamRoster::bot("Red", "random"), TeamRoster::bot("Blue", "random")];
    let mut state = new_session(&config).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut policy_rng = PolicyRng::seed_from_u64(!seed);
    let mut rejected = 0;
    while state.phase() == Phase::AwaitingMove {
        let legal = legal_moves(&state).map_err(|e| e.to_string())?;
        let active = state.active_team();
        let mut accepted = false;
        for _ in 0..4 {
            let (team, mv) = random_candidate(&state, &mut rng);
            let before = state.log().len();
            match state.submit_move(team, &mv) {
                Ok(()) => {
                    if team != active || !legal.iter().any(|l| l.same_option(&mv)) {
                        return Err(format!("seed {seed}: accepted {mv} for {team}, not a legal option"));
                    }
                    accepted = true;
                    break;
                }
                Err(_) => {
                    rejected += 1;
                    if state.log().len() != before {
                        return Err(format!("seed {seed}: rejected {mv} still changed the log"));
                    }
                }
            }
        }
        if !accepted {
            let mv = UniformRandom.decide(&state, &legal, &mut policy_rng);
            state
                .submit_move(active, &mv)
                .map_err(|r| format!("seed {seed}: random policy move {mv} rejected: {r}"))?;
        }
    }
    Ok((config, state, rejected))
}

fn determinism_and_replay() -> Outcome {
    let mut rejected = 0;
    let mut events = 0;
    for seed in 0..1000u64 {
        let (config, state, r) = fuzz_game(seed)?;
        rejected += r;
        let file = ReplayFile::record(&config, &state);
        let text = file.to_jsonl();
        let parsed = ReplayFile::parse(&text).map_err(|e| format!("seed {seed}: {e}"))?;
        let rerun = replay(&parsed, default_pack()).map_err(|e| format!("seed {seed}: {e}"))?;
        let again = ReplayFile::record(&config, &rerun).to_jsonl();
        if again != text {
            return Err(format!("seed {seed}: replayed log differs"));
        }
        events += state.log().len();
    }
    Ok(format!(
        "1000 fuzzed games, {events} events replayed byte-identical; {rejected} illegal submissions rejected, none accepted"
    ))
}

fn game_end_rule() -> Outcome {
    let round = modules_complete_fixture()?;
    let moves = round_limit_fixture(60)?;
    end_precedence_fixture()?;
    Ok(format!(
        "module completion ends the game in round {round}; round limit 60 ends it after {moves} moves; completion wins a tie with the limit"
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 6] = [
        ("dice-rule oracle equivalence", dice_oracle),
        ("repayment probabilities", repayment_probabilities),
        ("short-term gain, long-term cost", short_and_long_term),
        ("aha coverage", aha_coverage),
        ("determinism and replay", determinism_and_replay),
        ("game-end rule", game_end_rule),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail} [{:.2?}]", start.elapsed()),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail} [{:.2?}]", start.elapsed());
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
