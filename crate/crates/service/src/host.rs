//! The session host: lobby, seat tokens, move submission, push fan-out and
//! archiving. Each session sits behind its own mutex, which serializes every
//! command against it; pushes are sent while that lock is held, so every
//! subscriber sees them in log order.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock, Weak};
use std::time::Duration;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use tokio::sync::broadcast;
use uuid::Uuid;

use techdebt_core::rules::{auto_bind, legal_moves, Phase};
use techdebt_core::session::{Seat, TeamRoster};
use techdebt_core::sim::{policy_by_name, Policy, PolicyRng};
use techdebt_core::{
    default_pack, new_session, ContentPack, GameEvent, GameState, Move, ReplayFile, SessionConfig,
    TeamId,
};

use crate::error::ServiceError;
use crate::store::{ArchiveReceipt, GameStore, LiveLog, StoreError};
use crate::view::{ClientView, Projection, SeatRef, SeatView, SessionStatus};
use crate::PROTOCOL_VERSION;

pub const DEFAULT_CLOCK: Duration = Duration::from_secs(60 * 60);

/// Pushes buffered per subscriber before it has to resync.
const PUSH_BUFFER: usize = 1024;

/// Body of `POST /sessions`. Every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    #[serde(default)]
    pub pack: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub max_rounds: Option<u32>,
    #[serde(default)]
    pub td_penalty: Option<u32>,
    #[serde(default)]
    pub teams: Option<Vec<TeamRoster>>,
    /// Wall-clock limit in minutes, 0 for none. Defaults to the host's.
    #[serde(default)]
    pub clock_minutes: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeatToken {
    pub team: TeamId,
    pub seat: usize,
    pub name: String,
    pub token: String,
}

/// The only message that ever carries join tokens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Created {
    pub protocol: u32,
    pub session_id: String,
    pub tokens: Vec<SeatToken>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Joined {
    pub protocol: u32,
    pub seat: SeatRef,
    pub view: ClientView,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Accepted {
    pub protocol: u32,
    pub accepted: bool,
    pub view: ClientView,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PushKind {
    /// All seats are filled and the game has begun.
    Start,
    /// One accepted move.
    Move,
    /// The wall clock ran out.
    Clock,
    /// Catch-up after a reconnect or a lagging reader: every event since the
    /// subscriber's last sequence number and the current view.
    Resync,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Push {
    pub protocol: u32,
    pub kind: PushKind,
    pub seq: u64,
    /// Log events this push adds, in order.
    pub events: Vec<GameEvent>,
    pub view: ClientView,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StreamItem {
    Push(Box<Push>),
    /// The game is over; nothing follows.
    End,
}

#[derive(Debug)]
struct Broadcast {
    kind: PushKind,
    events: Vec<GameEvent>,
    projection: Projection,
}

#[derive(Debug)]
struct SeatSlot {
    seat: SeatRef,
    name: String,
    /// `None` for bot seats.
    token: Option<String>,
    joined: bool,
    player: String,
}

/// Persisted lobby record, written whenever the session changes status.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionRecord {
    pub session_id: String,
    pub status: SessionStatus,
    pub pack_name: String,
    pub pack_version: String,
    pub seed: u64,
    pub max_rounds: u32,
    pub td_penalty: u32,
    pub teams: Vec<TeamRoster>,
    pub seats: Vec<RecordSeat>,
    pub created_at: u64,
    pub finished_at: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecordSeat {
    pub team: TeamId,
    pub seat: usize,
    pub token: Option<String>,
    pub joined: bool,
}

struct Session {
    id: String,
    config: SessionConfig,
    status: SessionStatus,
    seats: Vec<SeatSlot>,
    state: Option<GameState>,
    /// `marks[k]` is the log length after input `k`; `marks[0]` is 0.
    marks: Vec<usize>,
    bots: [Option<Box<dyn Policy>>; 2],
    bot_rng: PolicyRng,
    clock_limit: Option<Duration>,
    created_at: u64,
    finished_at: Option<u64>,
    live: Option<LiveLog>,
    logged: usize,
    /// Log length covered by the pushes sent so far.
    published: usize,
    /// Created on first use so idle lobbies stay small.
    pushes: Option<broadcast::Sender<Arc<Broadcast>>>,
    store: Arc<GameStore>,
    time: Arc<AtomicU64>,
}

type Cell = Arc<Mutex<Session>>;

fn lock(cell: &Cell) -> std::sync::MutexGuard<'_, Session> {
    cell.lock().unwrap_or_else(|p| p.into_inner())
}

impl Session {
    fn seq(&self) -> u64 {
        self.marks.len().saturating_sub(1) as u64
    }

    fn seat_views(&self) -> Vec<SeatView> {
        self.seats
            .iter()
            .map(|s| SeatView {
                team: s.seat.team,
                seat: s.seat.seat,
                name: s.name.clone(),
                player: s.player.clone(),
                joined: s.joined,
            })
            .collect()
    }

    fn projection(&self) -> Projection {
        match &self.state {
            Some(state) => Projection::new(&self.id, self.status, self.seq(), self.seat_views(), state),
            None => {
                let preview = new_session(&self.config).expect("config validated at creation");
                Projection::new(&self.id, self.status, 0, self.seat_views(), &preview)
            }
        }
    }

    fn seat_for(&self, token: &str) -> Result<usize, ServiceError> {
        self.seats
            .iter()
            .position(|s| s.token.as_deref() == Some(token))
            .ok_or(ServiceError::BadToken)
    }

    fn record(&self) -> SessionRecord {
        SessionRecord {
            session_id: self.id.clone(),
            status: self.status,
            pack_name: self.config.pack.name.clone(),
            pack_version: self.config.pack.version.clone(),
            seed: self.config.seed,
            max_rounds: self.config.max_rounds,
            td_penalty: self.config.td_penalty,
            teams: self.config.teams.clone(),
            seats: self
                .seats
                .iter()
                .map(|s| RecordSeat {
                    team: s.seat.team,
                    seat: s.seat.seat,
                    token: s.token.clone(),
                    joined: s.joined,
                })
                .collect(),
            created_at: self.created_at,
            finished_at: self.finished_at,
        }
    }

    fn save_record(&self) -> Result<(), ServiceError> {
        Ok(self.store.save_record(&self.id, &self.record())?)
    }

    /// Write log events not yet on disk. Runs before any acknowledgment.
    fn flush_log(&mut self) -> Result<(), ServiceError> {
        let state = self.state.as_ref().expect("running session has a state");
        if let Some(live) = &mut self.live {
            let lines = state.log()[self.logged..].iter().map(ReplayFile::event_line);
            live.append(lines).map_err(StoreError::from)?;
        }
        self.logged = state.log().len();
        Ok(())
    }

    fn publish(&mut self, kind: PushKind) {
        let state = self.state.as_ref().expect("running session has a state");
        let len = state.log().len();
        let events = state.log()[self.published..].to_vec();
        self.published = len;
        if kind != PushKind::Start {
            self.marks.push(len);
        }
        let projection = self.projection();
        if let Some(tx) = &self.pushes {
            // No receivers is fine: nobody is streaming right now.
            let _ = tx.send(Arc::new(Broadcast {
                kind,
                events,
                projection,
            }));
        }
    }

    /// Log, close the session if the game just ended, then push. The order
    /// means a finishing push already reports status "finished".
    fn commit(&mut self, kind: PushKind) -> Result<(), ServiceError> {
        self.flush_log()?;
        let over = self.state.as_ref().is_some_and(|s| s.phase() == Phase::Finished);
        if over && self.status != SessionStatus::Finished {
            self.finish()?;
        }
        self.publish(kind);
        Ok(())
    }

    fn start(&mut self) -> Result<(), ServiceError> {
        let state = new_session(&self.config).map_err(|e| ServiceError::InvalidConfig(e.to_string()))?;
        self.live = self.store.open_live(&self.id)?;
        if let Some(live) = &mut self.live {
            let header = ReplayFile::record(&self.config, &state).header_line();
            live.append([header]).map_err(StoreError::from)?;
        }
        self.marks = vec![0];
        self.state = Some(state);
        self.status = SessionStatus::Running;
        self.commit(PushKind::Start)?;
        self.run_bots()
    }

    /// Let bot-driven teams move until a human team is to act.
    fn run_bots(&mut self) -> Result<(), ServiceError> {
        loop {
            let state = self.state.as_mut().expect("running session has a state");
            if state.phase() == Phase::Finished {
                return Ok(());
            }
            let team = state.active_team();
            let Some(policy) = &self.bots[team.index()] else {
                return Ok(());
            };
            let legal = legal_moves(state).unwrap_or_default();
            let mv = policy.decide(state, &legal, &mut self.bot_rng);
            if state.submit_move(team, &mv).is_err() {
                // A policy bug must not stall the table: take the first
                // listed option that goes through.
                let fallback = legal.iter().find_map(|m| {
                    let filled = match m {
                        Move::PlayAction { card_id, .. } => {
                            let t = state.team(team);
                            let card = t.hand.iter().find(|c| &c.id == card_id)?;
                            Move::PlayAction {
                                card_id: card_id.clone(),
                                bindings: auto_bind(t, card),
                            }
                        }
                        other => other.clone(),
                    };
                    state.submit_move(team, &filled).ok()
                });
                if fallback.is_none() {
                    return Ok(());
                }
            }
            self.commit(PushKind::Move)?;
        }
    }

    fn finish(&mut self) -> Result<(), ServiceError> {
        self.status = SessionStatus::Finished;
        self.finished_at = Some(self.time.fetch_add(1, Ordering::Relaxed));
        self.save_record()?;
        let replay = ReplayFile::record(&self.config, self.state.as_ref().expect("state"));
        self.store.archive(&self.id, &replay)?;
        Ok(())
    }

    fn expire_clock(&mut self) -> Result<(), ServiceError> {
        let Some(state) = self.state.as_mut() else {
            return Ok(());
        };
        if self.status != SessionStatus::Running || state.phase() == Phase::Finished {
            return Ok(());
        }
        state.expire_clock();
        self.commit(PushKind::Clock)?;
        self.run_bots()
    }
}

/// Hosts any number of sessions.
pub struct SessionHost {
    packs: BTreeMap<String, Arc<ContentPack>>,
    sessions: RwLock<HashMap<String, Cell>>,
    issued: Mutex<HashSet<String>>,
    store: Arc<GameStore>,
    time: Arc<AtomicU64>,
    default_clock: Option<Duration>,
}

impl SessionHost {
    /// A host offering the built-in pack, with the default 60-minute clock.
    pub fn new(store: GameStore) -> Self {
        let mut packs = BTreeMap::new();
        let pack = default_pack();
        packs.insert(pack.name.clone(), pack);
        SessionHost {
            packs,
            sessions: RwLock::default(),
            issued: Mutex::default(),
            store: Arc::new(store),
            time: Arc::new(AtomicU64::new(0)),
            default_clock: Some(DEFAULT_CLOCK),
        }
    }

    /// Offer another pack, under its own name.
    pub fn with_pack(mut self, pack: Arc<ContentPack>) -> Self {
        self.packs.insert(pack.name.clone(), pack);
        self
    }

    /// Clock for sessions that do not ask for one; `None` disables it.
    pub fn with_default_clock(mut self, clock: Option<Duration>) -> Self {
        self.default_clock = clock;
        self
    }

    pub fn pack_names(&self) -> Vec<String> {
        self.packs.keys().cloned().collect()
    }

    pub fn store(&self) -> &GameStore {
        &self.store
    }

    pub fn session_count(&self) -> usize {
        self.sessions.read().expect("sessions lock").len()
    }

    fn cell(&self, id: &str) -> Result<Cell, ServiceError> {
        self.sessions
            .read()
            .expect("sessions lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSession(id.to_string()))
    }

    fn fresh_token(&self) -> String {
        let mut issued = self.issued.lock().expect("token lock");
        loop {
            let token = Uuid::new_v4().simple().to_string();
            if issued.insert(token.clone()) {
                return token;
            }
        }
    }

    fn config_for(&self, req: &CreateSession) -> Result<SessionConfig, ServiceError> {
        let pack = match &req.pack {
            Some(name) => self
                .packs
                .get(name)
                .cloned()
                .ok_or_else(|| ServiceError::UnknownPack(name.clone()))?,
            None => default_pack(),
        };
        let mut config = SessionConfig::new(pack, req.seed.unwrap_or_else(rand::random));
        if let Some(r) = req.max_rounds {
            config.max_rounds = r;
        }
        if let Some(p) = req.td_penalty {
            config.td_penalty = p;
        }
        if let Some(teams) = &req.teams {
            config.teams = teams.clone();
        }
        config
            .validate()
            .map_err(|e| ServiceError::InvalidConfig(e.to_string()))?;
        for team in &config.teams {
            for seat in &team.seats {
                if let Seat::Bot { policy } = seat {
                    if policy_by_name(policy).is_none() {
                        return Err(ServiceError::InvalidConfig(format!("unknown bot policy '{policy}'")));
                    }
                }
            }
        }
        Ok(config)
    }

    pub fn create_session(&self, req: &CreateSession) -> Result<Created, ServiceError> {
        let config = self.config_for(req)?;
        let id = Uuid::new_v4().to_string();
        let mut seats = Vec::new();
        let mut tokens = Vec::new();
        for (t, team) in config.teams.iter().enumerate() {
            for (k, seat) in team.seats.iter().enumerate() {
                let at = SeatRef {
                    team: TeamId(t as u8),
                    seat: k,
                };
                let (name, token, player) = match seat {
                    Seat::Human { name } => {
                        let token = self.fresh_token();
                        tokens.push(SeatToken {
                            team: at.team,
                            seat: k,
                            name: name.clone(),
                            token: token.clone(),
                        });
                        (name.clone(), Some(token), "human".to_string())
                    }
                    Seat::Bot { policy } => (format!("{} bot", team.name), None, policy.clone()),
                };
                seats.push(SeatSlot {
                    seat: at,
                    name,
                    joined: token.is_none(),
                    token,
                    player,
                });
            }
        }
        // A team is bot-driven only when it has no human seat.
        let bots = [0, 1].map(|t| {
            let team = &config.teams[t];
            let all_bots = team.seats.iter().all(|s| matches!(s, Seat::Bot { .. }));
            match team.seats.first() {
                Some(Seat::Bot { policy }) if all_bots => policy_by_name(policy),
                _ => None,
            }
        });
        let clock_limit = match req.clock_minutes {
            Some(0) => None,
            Some(m) => Some(Duration::from_secs(m * 60)),
            None => self.default_clock,
        };
        let session = Session {
            id: id.clone(),
            bot_rng: PolicyRng::seed_from_u64(config.seed ^ 0x9e37_79b9_7f4a_7c15),
            config,
            status: SessionStatus::Lobby,
            seats,
            state: None,
            marks: Vec::new(),
            bots,
            clock_limit,
            created_at: self.time.fetch_add(1, Ordering::Relaxed),
            finished_at: None,
            live: None,
            logged: 0,
            published: 0,
            pushes: None,
            store: self.store.clone(),
            time: self.time.clone(),
        };
        session.save_record()?;
        let cell = Arc::new(Mutex::new(session));
        self.sessions
            .write()
            .expect("sessions lock")
            .insert(id.clone(), cell.clone());
        self.start_if_full(&cell)?;
        Ok(Created {
            protocol: PROTOCOL_VERSION,
            session_id: id,
            tokens,
        })
    }

    fn start_if_full(&self, cell: &Cell) -> Result<(), ServiceError> {
        let mut session = lock(cell);
        if session.status != SessionStatus::Lobby || !session.seats.iter().all(|s| s.joined) {
            return Ok(());
        }
        session.start()?;
        session.save_record()?;
        if let (Some(limit), Ok(rt)) = (session.clock_limit, tokio::runtime::Handle::try_current()) {
            let weak: Weak<Mutex<Session>> = Arc::downgrade(cell);
            rt.spawn(async move {
                tokio::time::sleep(limit).await;
                if let Some(cell) = weak.upgrade() {
                    let _ = lock(&cell).expire_clock();
                }
            });
        }
        Ok(())
    }

    /// Claim a seat, or reconnect to one already claimed with the same token.
    pub fn join(&self, id: &str, token: &str) -> Result<Joined, ServiceError> {
        let cell = self.cell(id)?;
        let seat = {
            let mut session = lock(&cell);
            let index = match session.seat_for(token) {
                Ok(i) => i,
                Err(_) if session.seats.iter().all(|s| s.joined) => {
                    return Err(ServiceError::SessionFull)
                }
                Err(e) => return Err(e),
            };
            let first_time = !session.seats[index].joined;
            session.seats[index].joined = true;
            if first_time {
                session.save_record()?;
            }
            session.seats[index].seat
        };
        self.start_if_full(&cell)?;
        let view = lock(&cell).projection().for_seat(Some(seat));
        Ok(Joined {
            protocol: PROTOCOL_VERSION,
            seat,
            view,
        })
    }

    /// Submit a move for the token's seat. `claimed_team`, when given, must
    /// match the seat's team.
    pub fn submit(
        &self,
        id: &str,
        token: &str,
        mv: &Move,
        claimed_team: Option<TeamId>,
    ) -> Result<Accepted, ServiceError> {
        let cell = self.cell(id)?;
        let mut session = lock(&cell);
        let index = session.seat_for(token)?;
        let seat = session.seats[index].seat;
        if !session.seats[index].joined {
            return Err(ServiceError::NotJoined);
        }
        if let Some(claimed) = claimed_team {
            if claimed != seat.team {
                return Err(ServiceError::NotYourSeatsTeam {
                    seat_team: seat.team.0,
                    claimed: claimed.0,
                });
            }
        }
        let state = match session.status {
            SessionStatus::Lobby => return Err(ServiceError::NotStarted),
            _ => session.state.as_mut().expect("started session has a state"),
        };
        state.submit_move(seat.team, mv)?;
        session.commit(PushKind::Move)?;
        session.run_bots()?;
        Ok(Accepted {
            protocol: PROTOCOL_VERSION,
            accepted: true,
            view: session.projection().for_seat(Some(seat)),
        })
    }

    /// Current view for a seat, or a spectator view without a token.
    pub fn view(&self, id: &str, token: Option<&str>) -> Result<ClientView, ServiceError> {
        let cell = self.cell(id)?;
        let session = lock(&cell);
        let seat = match token {
            Some(t) => Some(session.seats[session.seat_for(t)?].seat),
            None => None,
        };
        Ok(session.projection().for_seat(seat))
    }

    /// Run the wall-clock expiry now, as the session timer would.
    pub fn expire_clock(&self, id: &str) -> Result<ClientView, ServiceError> {
        let cell = self.cell(id)?;
        let mut session = lock(&cell);
        session.expire_clock()?;
        Ok(session.projection().for_seat(None))
    }

    /// Follow a session from sequence number `since` (0 when absent). If the
    /// session is already past it, the first item is a resync push.
    pub fn subscribe(
        &self,
        id: &str,
        token: &str,
        since: Option<u64>,
    ) -> Result<Subscription, ServiceError> {
        let cell = self.cell(id)?;
        let mut session = lock(&cell);
        let index = session.seat_for(token)?;
        if !session.seats[index].joined {
            return Err(ServiceError::NotJoined);
        }
        let seat = session.seats[index].seat;
        let rx = session
            .pushes
            .get_or_insert_with(|| broadcast::channel(PUSH_BUFFER).0)
            .subscribe();
        let current = session.seq();
        let since = since.unwrap_or(0);
        if since > current {
            return Err(ServiceError::BadSequence { since, current });
        }
        let mut sub = Subscription {
            cell: cell.clone(),
            seat,
            rx,
            last_seq: since,
            queue: VecDeque::new(),
            done: false,
        };
        if session.status != SessionStatus::Lobby
            && (since < current || session.status == SessionStatus::Finished)
        {
            sub.resync(&session);
        }
        drop(session);
        Ok(sub)
    }

    /// Store a finished session's replay. Repeated calls are no-ops.
    pub fn archive(&self, id: &str) -> Result<ArchiveReceipt, ServiceError> {
        let cell = self.cell(id)?;
        let session = lock(&cell);
        if session.status != SessionStatus::Finished {
            return Err(ServiceError::NotFinished);
        }
        let replay = ReplayFile::record(&session.config, session.state.as_ref().expect("state"));
        Ok(self.store.archive(id, &replay)?)
    }

    /// The archived replay of a session, as stored.
    pub fn archived_replay(&self, id: &str) -> Result<String, ServiceError> {
        self.store.fetch_text(id).map_err(|e| match e {
            StoreError::NotFound(id) => ServiceError::NotFound(id),
            other => other.into(),
        })
    }

    pub fn record(&self, id: &str) -> Result<SessionRecord, ServiceError> {
        Ok(lock(&self.cell(id)?).record())
    }
}

/// One seat's ordered feed of pushes.
pub struct Subscription {
    cell: Cell,
    seat: SeatRef,
    rx: broadcast::Receiver<Arc<Broadcast>>,
    last_seq: u64,
    queue: VecDeque<StreamItem>,
    done: bool,
}

impl Subscription {
    pub fn seat(&self) -> SeatRef {
        self.seat
    }

    pub fn last_seq(&self) -> u64 {
        self.last_seq
    }

    fn resync(&mut self, session: &Session) {
        let from = match self.last_seq {
            0 => 0,
            k => session.marks.get(k as usize).copied().unwrap_or(0),
        };
        let events = session
            .state
            .as_ref()
            .map(|s| s.log()[from..].to_vec())
            .unwrap_or_default();
        let projection = session.projection();
        self.last_seq = projection.seq();
        self.enqueue(PushKind::Resync, events, &projection);
    }

    fn enqueue(&mut self, kind: PushKind, events: Vec<GameEvent>, projection: &Projection) {
        self.queue.push_back(StreamItem::Push(Box::new(Push {
            protocol: PROTOCOL_VERSION,
            kind,
            seq: projection.seq(),
            events,
            view: projection.for_seat(Some(self.seat)),
        })));
        if projection.is_finished() {
            self.queue.push_back(StreamItem::End);
            self.done = true;
        }
    }

    /// The next item, waiting for one if needed. `None` after [`StreamItem::End`].
    pub async fn next(&mut self) -> Option<StreamItem> {
        loop {
            if let Some(item) = self.queue.pop_front() {
                return Some(item);
            }
            if self.done {
                return None;
            }
            match self.rx.recv().await {
                Ok(b) => {
                    let seq = b.projection.seq();
                    // Start has seq 0 and is new unless we already resynced.
                    let fresh = seq > self.last_seq || (b.kind == PushKind::Start && self.last_seq == 0);
                    if fresh {
                        self.last_seq = seq;
                        self.enqueue(b.kind, b.events.clone(), &b.projection);
                    }
                }
                Err(broadcast::error::RecvError::Lagged(_)) => {
                    let cell = self.cell.clone();
                    let session = lock(&cell);
                    self.resync(&session);
                }
                Err(broadcast::error::RecvError::Closed) => return None,
            }
        }
    }
}
