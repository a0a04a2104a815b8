//! HTTP binding of the session host.
//!
//! | method | path                       | body / query                     |
//! |--------|----------------------------|----------------------------------|
//! | GET    | `/packs`                   |                                  |
//! | POST   | `/sessions`                | [`CreateSession`] (may be empty) |
//! | POST   | `/sessions/{id}/join`      | `{"token"}`                      |
//! | POST   | `/sessions/{id}/moves`     | `{"token", "move", "team"?}`     |
//! | GET    | `/sessions/{id}/state`     | `?token=` (optional)             |
//! | GET    | `/sessions/{id}/stream`    | `?token=&since=`, SSE            |
//! | POST   | `/sessions/{id}/archive`   |                                  |
//! | GET    | `/sessions/{id}/replay`    | archived JSON Lines              |
//!
//! Errors come back as `{"protocol": 1, "error": {"code", "message"}}`.

use std::convert::Infallible;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tokio::net::TcpListener;
use tokio::task::JoinHandle;

use techdebt_core::{Move, TeamId};

use crate::error::ServiceError;
use crate::host::{CreateSession, SessionHost, StreamItem};
use crate::store::StoreError;
use crate::PROTOCOL_VERSION;

type Host = Arc<SessionHost>;

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match &self {
            ServiceError::UnknownSession(_)
            | ServiceError::NotFound(_)
            | ServiceError::Storage(StoreError::NotFound(_)) => StatusCode::NOT_FOUND,
            ServiceError::UnknownPack(_)
            | ServiceError::InvalidConfig(_)
            | ServiceError::BadRequest(_)
            | ServiceError::BadSequence { .. } => StatusCode::BAD_REQUEST,
            ServiceError::BadToken | ServiceError::NotJoined => StatusCode::FORBIDDEN,
            ServiceError::SessionFull
            | ServiceError::NotStarted
            | ServiceError::NotFinished
            | ServiceError::NotYourSeatsTeam { .. }
            | ServiceError::Rejected(_) => StatusCode::CONFLICT,
            ServiceError::Storage(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(self.body())).into_response()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoinRequest {
    pub token: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveRequest {
    pub token: String,
    #[serde(rename = "move")]
    pub mv: Move,
    /// The team the client believes it is playing for.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub team: Option<TeamId>,
}

#[derive(Debug, Deserialize)]
struct SeatQuery {
    token: Option<String>,
    since: Option<u64>,
}

#[derive(Serialize)]
struct PackList {
    protocol: u32,
    packs: Vec<String>,
}

fn parse<T: DeserializeOwned>(body: &Bytes) -> Result<T, ServiceError> {
    serde_json::from_slice(body).map_err(|e| ServiceError::BadRequest(e.to_string()))
}

async fn packs(State(host): State<Host>) -> Json<PackList> {
    Json(PackList {
        protocol: PROTOCOL_VERSION,
        packs: host.pack_names(),
    })
}

async fn create(State(host): State<Host>, body: Bytes) -> Result<Response, ServiceError> {
    let req: CreateSession = if body.iter().all(u8::is_ascii_whitespace) {
        CreateSession::default()
    } else {
        parse(&body)?
    };
    let created = host.create_session(&req)?;
    Ok((StatusCode::CREATED, Json(created)).into_response())
}

async fn join(
    State(host): State<Host>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Response, ServiceError> {
    let req: JoinRequest = parse(&body)?;
    Ok(Json(host.join(&id, &req.token)?).into_response())
}

async fn submit(
    State(host): State<Host>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Response, ServiceError> {
    let req: MoveRequest = parse(&body)?;
    Ok(Json(host.submit(&id, &req.token, &req.mv, req.team)?).into_response())
}

async fn state(
    State(host): State<Host>,
    Path(id): Path<String>,
    Query(q): Query<SeatQuery>,
) -> Result<Response, ServiceError> {
    Ok(Json(host.view(&id, q.token.as_deref())?).into_response())
}

async fn stream(
    State(host): State<Host>,
    Path(id): Path<String>,
    Query(q): Query<SeatQuery>,
    headers: HeaderMap,
) -> Result<Response, ServiceError> {
    let token = q
        .token
        .ok_or_else(|| ServiceError::BadRequest("stream needs ?token=".to_string()))?;
    // A reconnecting EventSource sends the last id it saw.
    let since = q.since.or_else(|| {
        headers
            .get("last-event-id")
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.parse().ok())
    });
    let sub = host.subscribe(&id, &token, since)?;
    let events = futures::stream::unfold(sub, |mut sub| async move {
        let event = match sub.next().await? {
            StreamItem::Push(push) => Event::default()
                .event("push")
                .id(push.seq.to_string())
                .json_data(&*push)
                .expect("push serializes"),
            StreamItem::End => Event::default()
                .event("end")
                .data(format!("{{\"protocol\":{PROTOCOL_VERSION},\"end\":true}}")),
        };
        Some((Ok::<_, Infallible>(event), sub))
    });
    Ok(Sse::new(events).keep_alive(KeepAlive::default()).into_response())
}

async fn archive(State(host): State<Host>, Path(id): Path<String>) -> Result<Response, ServiceError> {
    Ok(Json(host.archive(&id)?).into_response())
}

async fn replay(State(host): State<Host>, Path(id): Path<String>) -> Result<Response, ServiceError> {
    let text = host.archived_replay(&id)?;
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], text).into_response())
}

pub fn router(host: Host) -> Router {
    Router::new()
        .route("/packs", get(packs))
        .route("/sessions", post(create))
        .route("/sessions/{id}/join", post(join))
        .route("/sessions/{id}/moves", post(submit))
        .route("/sessions/{id}/state", get(state))
        .route("/sessions/{id}/stream", get(stream))
        .route("/sessions/{id}/archive", post(archive))
        .route("/sessions/{id}/replay", get(replay))
        .with_state(host)
}

/// Bind `addr` and serve in the background. Returns the bound address, which
/// differs from `addr` when port 0 was asked for.
pub async fn spawn(host: Host, addr: SocketAddr) -> std::io::Result<(SocketAddr, JoinHandle<std::io::Result<()>>)> {
    let listener = TcpListener::bind(addr).await?;
    let local = listener.local_addr()?;
    let task = tokio::spawn(async move { axum::serve(listener, router(host)).await });
    Ok((local, task))
}

/// Serve until the process is stopped.
pub async fn serve(host: Host, addr: SocketAddr) -> std::io::Result<()> {
    let listener = TcpListener::bind(addr).await?;
    axum::serve(listener, router(host)).await
}
