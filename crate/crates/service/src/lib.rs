//! HTTP front end for the annotation store.
//!
//! Endpoints (all bodies JSON):
//! - `POST /api/register` issues an annotator token
//! - `GET /api/next?annotator=ID` serves the next candidate
//! - `POST /api/label` records `{candidate_id, annotator_id, label}`
//! - `GET /api/progress`, `GET /api/agreement`, `GET /api/export`

use std::net::SocketAddr;
use std::sync::{Arc, Mutex, MutexGuard};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use knowref_core::annotation::{AggregationPolicy, AnnotationStore, Decision};
use knowref_core::evaluation::fleiss_kappa;
use knowref_core::{Error, ProblemInstance};

#[derive(Clone)]
pub struct AppState {
    store: Arc<Mutex<AnnotationStore>>,
    policy: AggregationPolicy,
}

impl AppState {
    pub fn new(store: AnnotationStore, policy: AggregationPolicy) -> knowref_core::Result<Self> {
        policy.validate()?;
        Ok(Self {
            store: Arc::new(Mutex::new(store)),
            policy,
        })
    }

    fn lock(&self) -> MutexGuard<'_, AnnotationStore> {
        // A panic while holding the lock cannot leave a half-applied event:
        // events are applied only after they are on disk.
        self.store.lock().unwrap_or_else(|e| e.into_inner())
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/register", post(register))
        .route("/api/next", get(next))
        .route("/api/label", post(label))
        .route("/api/progress", get(progress))
        .route("/api/agreement", get(agreement))
        .route("/api/export", get(export))
        .with_state(state)
}

/// Serves until Ctrl-C.
pub async fn serve(addr: SocketAddr, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

struct ApiError(Error);

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        Self(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, kind) = match &self.0 {
            Error::UnknownAnnotator(_) => (StatusCode::UNAUTHORIZED, "unknown_annotator"),
            Error::UnknownCandidate(_) => (StatusCode::NOT_FOUND, "unknown_candidate"),
            Error::MalformedLabel(_) => (StatusCode::UNPROCESSABLE_ENTITY, "malformed_label"),
            Error::InvalidConfig(_) => (StatusCode::BAD_REQUEST, "invalid_request"),
            _ => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        (status, Json(json!({ "error": kind, "message": self.0.to_string() }))).into_response()
    }
}

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RegisterResponse {
    pub annotator_id: String,
}

async fn register(State(state): State<AppState>) -> Result<Json<RegisterResponse>, ApiError> {
    let annotator_id = blocking(move || state.lock().register(now())).await?;
    Ok(Json(RegisterResponse { annotator_id }))
}

#[derive(Debug, Deserialize)]
pub struct NextQuery {
    pub annotator: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct NextResponse {
    /// `None` once this annotator has nothing left to label.
    pub instance: Option<ProblemInstance>,
    pub done: bool,
}

async fn next(
    State(state): State<AppState>,
    Query(q): Query<NextQuery>,
) -> Result<Json<NextResponse>, ApiError> {
    let store = state.lock();
    let instance = store.next_candidate(&q.annotator, &state.policy)?.cloned();
    Ok(Json(NextResponse {
        done: instance.is_none(),
        instance,
    }))
}

/// A label submission; the server stamps the time.
#[derive(Debug, Serialize, Deserialize)]
pub struct LabelRequest {
    pub candidate_id: String,
    pub annotator_id: String,
    pub label: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LabelResponse {
    pub candidate_id: String,
    pub decision: Decision,
}

async fn label(
    State(state): State<AppState>,
    Json(req): Json<LabelRequest>,
) -> Result<Json<LabelResponse>, ApiError> {
    let decision = blocking(move || {
        let mut store = state.lock();
        store.submit_raw(&req.candidate_id, &req.annotator_id, &req.label, now())?;
        let decision = store.aggregate(&req.candidate_id, &state.policy)?;
        Ok(LabelResponse {
            candidate_id: req.candidate_id,
            decision,
        })
    })
    .await?;
    Ok(Json(decision))
}

async fn progress(State(state): State<AppState>) -> impl IntoResponse {
    Json(state.lock().progress(&state.policy))
}

async fn agreement(State(state): State<AppState>) -> impl IntoResponse {
    Json(state.lock().agreement(&state.policy))
}

async fn export(State(state): State<AppState>) -> impl IntoResponse {
    let export = state.lock().export(&state.policy);
    let kappa = fleiss_kappa(&export.matrix).ok();
    Json(json!({
        "instances": export.instances,
        "matrix": export.matrix,
        "kappa": kappa,
    }))
}

/// Store writes sync to disk, so they run off the async workers.
async fn blocking<T, F>(f: F) -> Result<T, ApiError>
where
    F: FnOnce() -> knowref_core::Result<T> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError(Error::Io(std::io::Error::other(e))))?
        .map_err(ApiError)
}
