//! HTTP session service.
//!
//! | method | path | body | success |
//! |---|---|---|---|
//! | POST | `/sessions` | `{participants, id?}` | 201, session document |
//! | GET | `/sessions/{id}/next?jump=<instance>` | | 200, status |
//! | POST | `/sessions/{id}/answers` | `{revision, instance, answer}` | 200, session document |
//! | POST | `/sessions/{id}/skips` | `{revision, instance, reason}` | 200, session document |
//! | POST | `/sessions/{id}/finalize` | `{revision}` | 200, session document |
//! | GET | `/sessions/{id}/spec` | | 200, specification document |
//! | GET | `/templates/default` | | 200, template document |
//!
//! Response bodies use the canonical JSON of the file formats. Errors are
//! `{"error": <name>, "description": <text>, ...}` with status 400 for
//! malformed bodies, 404 for unknown sessions, 409 for stale revisions or
//! an existing session id and 422 for requests the engine rejects (the
//! remaining fields are the engine's error payload).

use std::path::PathBuf;
use std::sync::Arc;

use anyhow::anyhow;
use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use greybox_core::canonical::{self, DocumentError};
use greybox_core::checklist::{Answer, ChecklistError, ChecklistSession, Engine};
use greybox_core::problem_model::{write_spec, Participant};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::intake::{self, SessionExists, StaleRevision};
use crate::store::{self, valid_session_id, Store};

#[derive(Clone)]
struct AppState {
    engine: Arc<Engine>,
    store: Arc<Store>,
}

pub fn router(engine: Engine, data_dir: impl Into<PathBuf>) -> Router {
    let state = AppState {
        engine: Arc::new(engine),
        store: Arc::new(Store::new(data_dir)),
    };
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/next", get(next_item))
        .route("/sessions/{id}/answers", post(post_answer))
        .route("/sessions/{id}/skips", post(post_skip))
        .route("/sessions/{id}/finalize", post(post_finalize))
        .route("/sessions/{id}/spec", get(get_spec))
        .route("/templates/default", get(get_template))
        .with_state(state)
}

fn json_response(status: StatusCode, bytes: Vec<u8>) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], bytes).into_response()
}

#[derive(Debug)]
struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, error: &str, description: impl Into<String>) -> Self {
        ApiError {
            status,
            body: json!({ "error": error, "description": description.into() }),
        }
    }

    fn unknown_session(id: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "unknown_session", format!("no session {id:?}"))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        json_response(self.status, canonical::to_bytes(&self.body))
    }
}

impl From<anyhow::Error> for ApiError {
    fn from(err: anyhow::Error) -> Self {
        for cause in err.chain() {
            if let Some(e) = cause.downcast_ref::<ChecklistError>() {
                let mut body = canonical::to_value(e);
                body["description"] = Value::String(e.to_string());
                return ApiError {
                    status: StatusCode::UNPROCESSABLE_ENTITY,
                    body,
                };
            }
            if let Some(e) = cause.downcast_ref::<StaleRevision>() {
                return ApiError {
                    status: StatusCode::CONFLICT,
                    body: json!({
                        "error": "stale_revision",
                        "current": e.current,
                        "provided": e.provided,
                        "description": e.to_string(),
                    }),
                };
            }
            if let Some(e) = cause.downcast_ref::<SessionExists>() {
                return ApiError::new(StatusCode::CONFLICT, "session_exists", e.to_string());
            }
            if cause.is::<DocumentError>() {
                return ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "corrupt_session", format!("{err:#}"));
            }
        }
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", format!("{err:#}"))
    }
}

type ApiResult = Result<Response, ApiError>;

fn parse_body<T: DeserializeOwned>(bytes: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "bad_request", e.to_string()))
}

fn session_path(state: &AppState, id: &str) -> Result<PathBuf, ApiError> {
    let path = state.store.session_path(id);
    if !valid_session_id(id) || !path.exists() {
        return Err(ApiError::unknown_session(id));
    }
    Ok(path)
}

fn session_response(state: &AppState, status: StatusCode, session: &ChecklistSession) -> Response {
    json_response(status, state.engine.save_session(session))
}

/// Runs a mutation while holding the session's writer lock.
fn mutate(
    state: &AppState,
    id: &str,
    op: impl FnOnce(&Engine, &std::path::Path) -> anyhow::Result<ChecklistSession>,
) -> ApiResult {
    let path = session_path(state, id)?;
    let lock = state.store.lock(id);
    let _guard = lock.lock().unwrap_or_else(|e| e.into_inner());
    let session = op(&state.engine, &path)?;
    Ok(session_response(state, StatusCode::OK, &session))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateBody {
    participants: Vec<Participant>,
    #[serde(default)]
    id: Option<String>,
}

async fn create_session(State(state): State<AppState>, body: Bytes) -> ApiResult {
    let body: CreateBody = parse_body(&body)?;
    if let Some(id) = &body.id {
        if !valid_session_id(id) {
            return Err(ApiError::new(
                StatusCode::BAD_REQUEST,
                "bad_request",
                format!("session id {id:?} may only use letters, digits, '-' and '_'"),
            ));
        }
    }
    let session = state
        .engine
        .new_session(body.participants, body.id)
        .map_err(anyhow::Error::from)?;
    let lock = state.store.lock(&session.id);
    let _guard = lock.lock().unwrap_or_else(|e| e.into_inner());
    let path = state.store.session_path(&session.id);
    if path.exists() {
        return Err(anyhow::Error::from(SessionExists(session.id)).into());
    }
    store::save_session(&state.engine, &path, &session)?;
    Ok(session_response(&state, StatusCode::CREATED, &session))
}

#[derive(Deserialize)]
struct NextQuery {
    jump: Option<String>,
}

async fn next_item(State(state): State<AppState>, Path(id): Path<String>, Query(q): Query<NextQuery>) -> ApiResult {
    let path = session_path(&state, &id)?;
    let session = store::load_session(&state.engine, &path)?;
    let status = intake::status(&state.engine, &session, q.jump.as_deref())?;
    Ok(json_response(StatusCode::OK, canonical::to_bytes(&status)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AnswerBody {
    revision: u64,
    instance: String,
    answer: Answer,
}

async fn post_answer(State(state): State<AppState>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let body: AnswerBody = parse_body(&body)?;
    mutate(&state, &id, |engine, path| {
        intake::answer(engine, path, &body.instance, body.answer, Some(body.revision))
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SkipBody {
    revision: u64,
    instance: String,
    reason: String,
}

async fn post_skip(State(state): State<AppState>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let body: SkipBody = parse_body(&body)?;
    mutate(&state, &id, |engine, path| {
        intake::skip(engine, path, &body.instance, &body.reason, Some(body.revision))
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FinalizeBody {
    revision: u64,
}

async fn post_finalize(State(state): State<AppState>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let body: FinalizeBody = parse_body(&body)?;
    mutate(&state, &id, |engine, path| {
        intake::finalize(engine, path, Some(body.revision)).map(|(session, _)| session)
    })
}

async fn get_spec(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let path = session_path(&state, &id)?;
    let spec_path = state.store.spec_path(&id);
    if spec_path.exists() {
        return Ok(json_response(StatusCode::OK, store::read(&spec_path)?));
    }
    // Not finalized yet: let the engine produce the error payload.
    let spec = intake::export(&state.engine, &path)?;
    Ok(json_response(StatusCode::OK, write_spec(&spec)))
}

async fn get_template(State(state): State<AppState>) -> ApiResult {
    Ok(json_response(StatusCode::OK, state.engine.template().to_bytes()))
}

/// Serves the API until interrupted.
pub async fn serve(engine: Engine, data_dir: PathBuf, addr: std::net::SocketAddr) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| anyhow!(e).context(format!("binding {addr}")))?;
    eprintln!(
        "serving sessions from {} on http://{}",
        data_dir.display(),
        listener.local_addr()?
    );
    axum::serve(listener, router(engine, data_dir))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
