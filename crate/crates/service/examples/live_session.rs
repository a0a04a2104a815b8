// Host a game in-process: one human seat against a bot team, a second
// client following the push stream, and the archived replay at the end.
//
//     cargo run -p techdebt-service --example live_session

use std::error::Error;

use techdebt_core::rules::Move;
use techdebt_core::session::TeamRoster;
use techdebt_service::{CreateSession, GameStore, SessionHost, SessionStatus, StreamItem};

fn pick(view: &techdebt_service::ClientView) -> Option<Move> {
    // Work when possible, otherwise whatever comes first; cards take the
    // server's suggested bindings.
    let mv = view
        .legal_moves
        .iter()
        .find(|m| matches!(m, Move::Work { .. }))
        .or(view.legal_moves.first())?
        .clone();
    Some(match mv {
        Move::PlayAction { card_id, .. } => {
            let prompt = view.card_prompts.iter().find(|p| p.card_id == card_id);
            Move::PlayAction {
                bindings: prompt.map(|p| p.suggested).unwrap_or_default(),
                card_id,
            }
        }
        other => other,
    })
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let rt = tokio::runtime::Builder::new_current_thread().enable_all().build()?;
    rt.block_on(async {
        let host = SessionHost::new(GameStore::in_memory()).with_default_clock(None);
        let created = host.create_session(&CreateSession {
            seed: Some(2024),
            max_rounds: Some(12),
            teams: Some(vec![TeamRoster::humans("Ada's team", 1), TeamRoster::bot("Bot team", "balanced")]),
            ..CreateSession::default()
        })?;
        let id = created.session_id.clone();
        let token = created.tokens[0].token.clone();
        let joined = host.join(&id, &token)?;
        println!("session {id}: seat {:?}, status {:?}", joined.seat, joined.view.status);

        let mut feed = host.subscribe(&id, &token, None)?;
        let mut moves = 0;
        while let Some(mv) = pick(&host.view(&id, Some(&token))?) {
            let accepted = host.submit(&id, &token, &mv, None)?;
            moves += 1;
            if moves % 5 == 0 {
                let v = &accepted.view;
                println!("after {moves:>2} moves: round {:>2}, score {:?}", v.round, v.scores.scores);
            }
        }

        let mut pushes = 0;
        while let Some(item) = feed.next().await {
            match item {
                StreamItem::Push(p) => {
                    pushes += 1;
                    if p.view.status == SessionStatus::Finished {
                        println!("final push #{}: {:?}, winner {:?}", p.seq, p.view.end_reason, p.view.winner);
                    }
                }
                StreamItem::End => println!("stream ended after {pushes} pushes"),
            }
        }

        let replay = host.archived_replay(&id)?;
        println!("archived replay: {} lines", replay.lines().count());
        Ok(())
    })
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
