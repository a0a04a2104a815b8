mod common;

use std::sync::Arc;
use std::thread;

use techdebt_core::rules::{EventKind, ModuleId};
use techdebt_core::session::TeamRoster;
use techdebt_core::{default_pack, replay, GameEvent, Move, TeamId};
use techdebt_service::view::Projection;
use techdebt_service::{
    CreateSession, Push, PushKind, SeatToken, ServiceError, SessionStatus, StreamItem, Subscription,
};

use common::{choose, host, play, replay_of, request, started, versus_bot};

async fn take(sub: &mut Subscription, n: usize) -> Vec<Push> {
    let mut out = Vec::new();
    while out.len() < n {
        match sub.next().await {
            Some(StreamItem::Push(p)) => out.push(*p),
            other => panic!("expected a push, got {other:?}"),
        }
    }
    out
}

#[tokio::test]
async fn scripted_game_gives_every_seat_one_push_per_move() {
    let host = host();
    let (id, tokens) = started(&host, &request(100, 200));
    let mut subs: Vec<Subscription> = tokens
        .iter()
        .map(|t| host.subscribe(&id, &t.token, None).unwrap())
        .collect();

    assert_eq!(play(&host, &id, &tokens, 100), 100);
    let log_len = host.view(&id, None).unwrap().log_len;

    for (sub, token) in subs.iter_mut().zip(&tokens) {
        let pushes = take(sub, 100).await;
        let seqs: Vec<u64> = pushes.iter().map(|p| p.seq).collect();
        assert_eq!(seqs, (1..=100).collect::<Vec<_>>());
        assert!(pushes.iter().all(|p| p.kind == PushKind::Move));
        // Event batches tile the log without gaps or overlap.
        let mut next = pushes[0].events[0].seq;
        for p in &pushes {
            assert_eq!(p.view.log_len as u64, p.events.last().unwrap().seq + 1);
            for e in &p.events {
                assert_eq!(e.seq, next);
                next += 1;
            }
            assert_eq!(p.view.you.unwrap().team, token.team);
        }
        assert_eq!(next as usize, log_len);
        // Exactly 100: nothing else is waiting.
        let extra = tokio::time::timeout(std::time::Duration::from_millis(50), sub.next()).await;
        assert!(extra.is_err(), "unexpected extra push");
    }
}

#[tokio::test]
async fn resync_after_dropped_pushes_matches_the_replay_prefix() {
    let host = host();
    let (id, tokens) = started(&host, &request(101, 200));
    play(&host, &id, &tokens, 20);

    // A client that starts from nothing gets the whole log at seq 20.
    let mut sub = host.subscribe(&id, &tokens[0].token, Some(0)).unwrap();
    let first = take(&mut sub, 1).await.remove(0);
    assert_eq!((first.kind, first.seq), (PushKind::Resync, 20));
    drop(sub);

    // Ten pushes go missing while it is disconnected.
    play(&host, &id, &tokens, 10);
    let mut sub = host.subscribe(&id, &tokens[0].token, Some(20)).unwrap();
    let resync = take(&mut sub, 1).await.remove(0);
    assert_eq!((resync.kind, resync.seq), (PushKind::Resync, 30));
    let inputs = resync
        .events
        .iter()
        .filter(|e| matches!(e.event, EventKind::MoveAccepted { .. }))
        .count();
    assert_eq!(inputs, 10);

    let events: Vec<GameEvent> = first.events.into_iter().chain(resync.events).collect();
    let file = replay_of(101, 200, None, events);
    let state = replay(&file, default_pack()).unwrap();
    let rebuilt = Projection::new(&id, SessionStatus::Running, 30, resync.view.seats.clone(), &state)
        .for_seat(resync.view.you);
    assert_eq!(rebuilt, resync.view);

    // Live pushes carry on from there.
    play(&host, &id, &tokens, 1);
    assert_eq!(take(&mut sub, 1).await[0].seq, 31);
}

#[tokio::test]
async fn since_ahead_of_the_session_is_refused() {
    let host = host();
    let (id, tokens) = started(&host, &request(102, 60));
    assert!(matches!(
        host.subscribe(&id, &tokens[0].token, Some(5)),
        Err(ServiceError::BadSequence { since: 5, current: 0 })
    ));
    assert!(matches!(host.subscribe(&id, "stranger", None), Err(ServiceError::BadToken)));
}

#[tokio::test]
async fn lobby_subscribers_see_the_start() {
    let host = host();
    let created = host.create_session(&request(103, 60)).unwrap();
    let id = &created.session_id;
    host.join(id, &created.tokens[0].token).unwrap();
    let mut sub = host.subscribe(id, &created.tokens[0].token, None).unwrap();
    for t in &created.tokens[1..] {
        host.join(id, &t.token).unwrap();
    }
    let start = take(&mut sub, 1).await.remove(0);
    assert_eq!((start.kind, start.seq), (PushKind::Start, 0));
    assert_eq!(start.view.status, SessionStatus::Running);
    assert_eq!(start.events.len(), start.view.log_len);
}

#[tokio::test]
async fn finished_game_streams_final_view_then_end() {
    let host = host();
    let (id, tokens) = started(&host, &versus_bot(104, 1, "balanced"));
    play(&host, &id, &tokens, 10);
    let mut sub = host.subscribe(&id, &tokens[0].token, None).unwrap();
    let last = take(&mut sub, 1).await.remove(0);
    assert_eq!(last.view.status, SessionStatus::Finished);
    assert!(last.view.winner.is_some() || last.view.scores.scores[0] == last.view.scores.scores[1]);
    assert_eq!(sub.next().await, Some(StreamItem::End));
    assert_eq!(sub.next().await, None);
}

#[tokio::test]
async fn live_stream_ends_when_the_game_does() {
    let host = host();
    let (id, tokens) = started(&host, &versus_bot(105, 2, "never-incur"));
    let mut sub = host.subscribe(&id, &tokens[0].token, None).unwrap();
    play(&host, &id, &tokens, 10);
    let mut pushes = Vec::new();
    loop {
        match sub.next().await {
            Some(StreamItem::Push(p)) => pushes.push(p),
            Some(StreamItem::End) => break,
            None => panic!("stream closed without an end marker"),
        }
    }
    // One push per accepted move, numbered from 1.
    let seqs: Vec<u64> = pushes.iter().map(|p| p.seq).collect();
    assert_eq!(seqs, (1..=pushes.last().unwrap().seq).collect::<Vec<_>>());
    assert_eq!(pushes.last().unwrap().view.status, SessionStatus::Finished);
    let running = &pushes[..pushes.len() - 1];
    assert!(running.iter().all(|p| p.view.status == SessionStatus::Running));
}

/// Two clients fire 1000 submits each, as fast as they can, each computing
/// its move from whatever view it last saw.
fn hammer(req: CreateSession, pick: impl Fn(&[SeatToken]) -> Vec<String>) {
    let host = Arc::new(host());
    let (id, tokens) = started(&host, &req);
    let players = pick(&tokens);
    let results: Vec<Vec<Result<u64, ServiceError>>> = players
        .into_iter()
        .map(|token| {
            let host = host.clone();
            let id = id.clone();
            thread::spawn(move || {
                (0..1000)
                    .map(|_| {
                        let view = host.view(&id, Some(&token)).unwrap();
                        let mv = choose(&view).unwrap_or(Move::StartTicket { module: ModuleId::A });
                        host.submit(&id, &token, &mv, None).map(|a| a.view.seq)
                    })
                    .collect()
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .map(|h| h.join().unwrap())
        .collect();

    let mut seqs: Vec<u64> = Vec::new();
    for r in results.iter().flatten() {
        match r {
            Ok(seq) => seqs.push(*seq),
            Err(e) => assert!(e.reject_code().is_some(), "non-rule error under load: {e}"),
        }
    }
    assert_eq!(results.iter().map(Vec::len).sum::<usize>(), 2000);
    assert!(!seqs.is_empty());
    // Acceptances are totally ordered: no two replies share a sequence number.
    let accepted = seqs.len();
    seqs.sort_unstable();
    seqs.dedup();
    assert_eq!(seqs.len(), accepted);

    // The session's log replays exactly, and every human acceptance is in it.
    let view = host.view(&id, None).unwrap();
    let sub_events = {
        let rt = tokio::runtime::Builder::new_current_thread().build().unwrap();
        rt.block_on(async {
            let mut sub = host.subscribe(&id, &tokens[0].token, Some(0)).unwrap();
            match sub.next().await {
                Some(StreamItem::Push(p)) => p.events,
                other => panic!("{other:?}"),
            }
        })
    };
    assert_eq!(sub_events.len(), view.log_len);
    let file = replay_of(req.seed.unwrap(), req.max_rounds.unwrap(), req.teams.clone(), sub_events);
    let state = replay(&file, default_pack()).unwrap();
    let human_inputs = state
        .log()
        .iter()
        .filter(|e| matches!(e.event, EventKind::MoveAccepted { .. }))
        .filter(|e| tokens.iter().any(|t| t.team == e.team))
        .count();
    assert_eq!(human_inputs, seqs.len());
    assert_eq!(state.provisional_score(), view.scores);
}

#[test]
fn hammer_opponents() {
    hammer(request(106, 1000), |tokens| {
        TeamId::BOTH
            .iter()
            .map(|team| tokens.iter().find(|t| t.team == *team).unwrap().token.clone())
            .collect()
    });
}

#[test]
fn hammer_teammates() {
    let req = CreateSession {
        teams: Some(vec![TeamRoster::humans("Humans", 2), TeamRoster::bot("Bots", "balanced")]),
        ..request(107, 1000)
    };
    hammer(req, |tokens| tokens.iter().map(|t| t.token.clone()).collect());
}
