// The HTTP wire protocol, request by request, against the real router.
// Prints each exchange so the JSON bodies can be read alongside the docs.
//
//     cargo run -p techdebt-service --example wire_protocol

use std::error::Error;
use std::sync::Arc;

use axum::body::Body;
use axum::http::Request;
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use techdebt_service::http::router;
use techdebt_service::{GameStore, SessionHost};

async fn send(app: &Router, method: &str, uri: &str, body: Option<Value>) -> Result<Value, Box<dyn Error>> {
    let req = Request::builder().method(method).uri(uri);
    let req = match &body {
        Some(v) => req.body(Body::from(v.to_string()))?,
        None => req.body(Body::empty())?,
    };
    let resp = app.clone().oneshot(req).await?;
    let status = resp.status();
    let bytes = resp.into_body().collect().await?.to_bytes();
    let value: Value = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    let shown = serde_json::to_string(&value)?;
    let shown = if shown.len() > 160 { format!("{}...", &shown[..160]) } else { shown };
    println!("{method} {uri} -> {status}\n    {shown}");
    Ok(value)
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let rt = tokio::runtime::Builder::new_current_thread().enable_all().build()?;
    rt.block_on(async {
        let host = SessionHost::new(GameStore::in_memory()).with_default_clock(None);
        let app = router(Arc::new(host));

        send(&app, "GET", "/packs", None).await?;
        let created = send(&app, "POST", "/sessions", Some(json!({ "seed": 3 }))).await?;
        let id = created["session_id"].as_str().ok_or("no id")?.to_string();
        let tokens: Vec<String> = created["tokens"]
            .as_array()
            .ok_or("no tokens")?
            .iter()
            .filter_map(|t| t["token"].as_str().map(String::from))
            .collect();
        for token in &tokens {
            send(&app, "POST", &format!("/sessions/{id}/join"), Some(json!({ "token": token }))).await?;
        }

        let first = &tokens[0];
        let view = send(&app, "GET", &format!("/sessions/{id}/state?token={first}"), None).await?;
        let mv = view["legal_moves"][0].clone();
        println!("team {} moves: {mv}", view["active_team"]);

        // An opponent trying the same move is told it is not their turn.
        send(&app, "POST", &format!("/sessions/{id}/moves"), Some(json!({ "token": tokens[2], "move": mv }))).await?;
        send(&app, "POST", &format!("/sessions/{id}/moves"), Some(json!({ "token": first, "move": mv }))).await?;
        send(&app, "POST", &format!("/sessions/{id}/moves"), Some(json!({ "token": first, "move": "jump" }))).await?;
        send(&app, "POST", &format!("/sessions/{id}/archive"), None).await?;
        Ok(())
    })
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
