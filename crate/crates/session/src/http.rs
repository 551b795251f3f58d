use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use btlint_core::Decision;
use serde_json::json;
use tokio::net::TcpListener;
use tokio::sync::RwLock;

use crate::session::{pretty, Session, SessionError};

pub type SharedSession = Arc<RwLock<Session>>;

fn json_body(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn error(status: StatusCode, message: impl ToString) -> Response {
    json_body(status, pretty(&json!({ "error": message.to_string() })))
}

async fn models(State(s): State<SharedSession>) -> Response {
    json_body(StatusCode::OK, s.read().await.models_json())
}

async fn relations(State(s): State<SharedSession>) -> Response {
    json_body(StatusCode::OK, s.read().await.relations_json())
}

async fn defects(State(s): State<SharedSession>) -> Response {
    json_body(StatusCode::OK, s.read().await.report().to_json_string())
}

async fn decisions(State(s): State<SharedSession>) -> Response {
    json_body(StatusCode::OK, s.read().await.decisions_json())
}

async fn strategy(State(s): State<SharedSession>) -> Response {
    json_body(StatusCode::OK, s.read().await.strategy_json())
}

async fn decide(State(s): State<SharedSession>, body: Result<Json<Decision>, JsonRejection>) -> Response {
    let Json(decision) = match body {
        Ok(d) => d,
        Err(e) => return error(StatusCode::BAD_REQUEST, e.body_text()),
    };
    let mut session = s.write().await;
    match session.record_decision(decision) {
        Ok(report) => json_body(StatusCode::OK, report.to_json_string()),
        Err(e @ SessionError::UnknownRelation(_)) => error(StatusCode::NOT_FOUND, e),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e),
    }
}

/// Routes under `/api`. Models and strategy are read-only; decisions are
/// the only thing a client can change.
pub fn router(session: SharedSession) -> Router {
    Router::new()
        .route("/api/models", get(models))
        .route("/api/relations", get(relations))
        .route("/api/defects", get(defects))
        .route("/api/decisions", get(decisions).post(decide))
        .route("/api/strategy", get(strategy))
        .with_state(session)
}

/// Serves `session` on `addr` until the task is dropped. `on_ready` gets the
/// bound address, useful with port 0.
pub async fn serve(session: Session, addr: SocketAddr, on_ready: impl FnOnce(SocketAddr)) -> std::io::Result<()> {
    let listener = TcpListener::bind(addr).await?;
    on_ready(listener.local_addr()?);
    axum::serve(listener, router(Arc::new(RwLock::new(session)))).await
}
