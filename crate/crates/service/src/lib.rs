//! Session-based JSON API for building green sequences interactively.
//!
//! Every response body is JSON. Errors are `{"error": CODE, "message": TEXT}`.
//! Bodies carry `api_version` (currently 1) where they describe a state.
//!
//! | method | path | body / query | success |
//! |---|---|---|---|
//! | GET | `/presets` | | `{api_version, presets: [PresetInfo]}` |
//! | POST | `/sessions` | `{"preset": NAME}` or `{"problem": TOML}` or `{}` | 201 `{id, state}` |
//! | GET | `/sessions/{id}` | | `StateView` |
//! | POST | `/sessions/{id}/mutate` | `{"vertex": V, "green_only": true}` | `StateView` |
//! | POST | `/sessions/{id}/undo` | | `StateView` |
//! | GET | `/sessions/{id}/green` | | `{green: [V]}` |
//! | GET | `/sessions/{id}/completions` | `?limit=L` | `Completions` |
//! | DELETE | `/sessions/{id}` | | 204 |
//!
//! Error statuses: 404 unknown session, 409 `not_green` / `empty_history`,
//! 422 invalid vertex or problem, 503 completion budget exhausted (the body
//! is still a `Completions` with `truncated` set).

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use greenhom_core::green::{enumerate_from, CVector, GreenError, SearchBounds, SearchState};
use greenhom_core::problem::{load_preset, parse_problem, preset_names, ProblemFile};
use greenhom_core::quiver::{QuiverError, VertexColor};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use tower_http::cors::CorsLayer;

pub const API_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct Config {
    pub idle_timeout: Duration,
    /// State budget for `completions`.
    pub completion_budget: u64,
    /// Re-derive the state from history on every request.
    pub debug_replay: bool,
    /// Problem used by `POST /sessions` with an empty body.
    pub default_problem: Option<ProblemFile>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            idle_timeout: Duration::from_secs(30 * 60),
            completion_budget: 1_000_000,
            debug_replay: cfg!(debug_assertions),
            default_problem: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum ApiError {
    #[error("no session `{0}`")]
    UnknownSession(String),
    #[error("vertex {0} is red")]
    NotGreen(usize),
    #[error("nothing to undo")]
    EmptyHistory,
    #[error("invalid vertex {0}")]
    InvalidVertex(usize),
    #[error("{0}")]
    BadRequest(String),
    #[error("replay check failed: {0}")]
    Internal(String),
}

impl ApiError {
    fn status(&self) -> (StatusCode, &'static str) {
        match self {
            ApiError::UnknownSession(_) => (StatusCode::NOT_FOUND, "unknown_session"),
            ApiError::NotGreen(_) => (StatusCode::CONFLICT, "not_green"),
            ApiError::EmptyHistory => (StatusCode::CONFLICT, "empty_history"),
            ApiError::InvalidVertex(_) => (StatusCode::UNPROCESSABLE_ENTITY, "invalid_vertex"),
            ApiError::BadRequest(_) => (StatusCode::UNPROCESSABLE_ENTITY, "invalid_request"),
            ApiError::Internal(_) => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        }
    }
}

impl From<GreenError> for ApiError {
    fn from(e: GreenError) -> Self {
        match e {
            GreenError::NotGreen(v) => ApiError::NotGreen(v),
            GreenError::Quiver(QuiverError::InvalidVertex(v))
            | GreenError::Quiver(QuiverError::MutationAtFrozenVertex(v)) => ApiError::InvalidVertex(v),
            other => ApiError::Internal(other.to_string()),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, code) = self.status();
        let body = ErrorBody {
            error: code.into(),
            message: self.to_string(),
        };
        (status, Json(body)).into_response()
    }
}

struct Session {
    problem: ProblemFile,
    state: SearchState,
    touched: Instant,
}

#[derive(Clone)]
pub struct AppState {
    config: Arc<Config>,
    sessions: Arc<Mutex<HashMap<String, Arc<Mutex<Session>>>>>,
}

impl AppState {
    pub fn new(config: Config) -> Self {
        AppState {
            config: Arc::new(config),
            sessions: Arc::default(),
        }
    }

    /// Drops sessions idle for longer than the configured timeout.
    pub fn sweep(&self) -> usize {
        let timeout = self.config.idle_timeout;
        let mut map = self.sessions.lock().unwrap();
        let before = map.len();
        map.retain(|_, s| s.lock().unwrap().touched.elapsed() <= timeout);
        before - map.len()
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().unwrap().len()
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.sweep();
        self.sessions
            .lock()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::UnknownSession(id.into()))
    }

    /// Runs `f` under the session's lock, refreshing its idle clock.
    fn with_session<T>(&self, id: &str, f: impl FnOnce(&mut Session) -> Result<T, ApiError>) -> Result<T, ApiError> {
        let s = self.session(id)?;
        let mut s = s.lock().unwrap();
        s.touched = Instant::now();
        if self.config.debug_replay {
            let replayed = SearchState::replay(&s.problem.quiver, &s.state.history)?;
            if replayed != s.state {
                return Err(ApiError::Internal(format!("history {:?}", s.state.history)));
            }
        }
        f(&mut s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowView {
    pub from: usize,
    pub to: usize,
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexView {
    pub vertex: usize,
    pub color: VertexColor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateView {
    pub api_version: u32,
    pub problem: String,
    /// Mutable vertices are `1..=n`, frozen ones `n+1..=2n`.
    pub n: usize,
    pub arrows: Vec<ArrowView>,
    pub colors: Vec<VertexView>,
    pub c_matrix: Vec<CVector>,
    pub history: Vec<usize>,
    pub trace: Vec<CVector>,
    pub all_red: bool,
    /// SHA-256 of the arrow list, hex.
    pub checksum: String,
}

fn view(s: &Session) -> Result<StateView, ApiError> {
    let st = &s.state.state;
    let n = s.problem.quiver.vertex_count();
    let arrows: Vec<ArrowView> = st
        .arrows()
        .into_iter()
        .map(|(from, to, multiplicity)| ArrowView { from, to, multiplicity })
        .collect();
    let colors = (1..=n)
        .map(|v| Ok(VertexView { vertex: v, color: st.vertex_color(v)? }))
        .collect::<Result<Vec<_>, QuiverError>>()
        .map_err(|e| ApiError::Internal(e.to_string()))?;
    let c_matrix = st.c_matrix().map_err(|e| ApiError::Internal(e.to_string()))?.to_rows();
    Ok(StateView {
        api_version: API_VERSION,
        problem: s.problem.name.clone(),
        n,
        all_red: colors.iter().all(|c| c.color == VertexColor::Red),
        checksum: checksum(&arrows),
        arrows,
        colors,
        c_matrix,
        history: s.state.history.clone(),
        trace: s.state.trace.clone(),
    })
}

pub fn checksum(arrows: &[ArrowView]) -> String {
    let mut h = Sha256::new();
    for a in arrows {
        h.update(format!("{}>{}x{};", a.from, a.to, a.multiplicity));
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresetInfo {
    pub name: String,
    pub vertices: usize,
    pub arrows: usize,
    pub b_specs: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PresetList {
    pub api_version: u32,
    pub presets: Vec<PresetInfo>,
}

async fn presets() -> Json<PresetList> {
    let presets = preset_names()
        .into_iter()
        .filter_map(|n| load_preset(n).ok())
        .map(|p| PresetInfo {
            name: p.name.clone(),
            vertices: p.quiver.vertex_count(),
            arrows: p.quiver.arrows().len(),
            b_specs: p.b_specs.keys().cloned().collect(),
        })
        .collect();
    Json(PresetList {
        api_version: API_VERSION,
        presets,
    })
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    pub preset: Option<String>,
    /// Problem file text.
    pub problem: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Created {
    pub id: String,
    pub state: StateView,
}

async fn create(State(app): State<AppState>, body: Option<Json<CreateSession>>) -> Result<(StatusCode, Json<Created>), ApiError> {
    let req = body.map(|Json(b)| b).unwrap_or_default();
    let problem = match (req.preset, req.problem) {
        (Some(name), None) => load_preset(&name).map_err(|e| ApiError::BadRequest(e.to_string()))?,
        (None, Some(text)) => parse_problem(&text).map_err(|e| ApiError::BadRequest(e.to_string()))?,
        (None, None) => app
            .config
            .default_problem
            .clone()
            .ok_or_else(|| ApiError::BadRequest("give `preset` or `problem`".into()))?,
        (Some(_), Some(_)) => return Err(ApiError::BadRequest("give only one of `preset` or `problem`".into())),
    };
    app.sweep();
    let session = Session {
        state: SearchState::initial(&problem.quiver),
        problem,
        touched: Instant::now(),
    };
    let state = view(&session)?;
    let id = uuid::Uuid::new_v4().simple().to_string();
    app.sessions
        .lock()
        .unwrap()
        .insert(id.clone(), Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(Created { id, state })))
}

async fn get_state(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<StateView>, ApiError> {
    app.with_session(&id, |s| view(s)).map(Json)
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MutateRequest {
    pub vertex: usize,
    #[serde(default = "default_true")]
    pub green_only: bool,
}

async fn mutate(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Json(req): Json<MutateRequest>,
) -> Result<Json<StateView>, ApiError> {
    app.with_session(&id, |s| {
        let n = s.problem.quiver.vertex_count();
        if req.vertex == 0 || req.vertex > n {
            return Err(ApiError::InvalidVertex(req.vertex));
        }
        s.state = if req.green_only {
            s.state.step(req.vertex)?
        } else {
            s.state.explore(req.vertex)?
        };
        view(s)
    })
    .map(Json)
}

async fn undo(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<StateView>, ApiError> {
    app.with_session(&id, |s| {
        s.state = s.state.undo().ok_or(ApiError::EmptyHistory)?;
        view(s)
    })
    .map(Json)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GreenList {
    pub green: Vec<usize>,
}

async fn green(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<GreenList>, ApiError> {
    app.with_session(&id, |s| Ok(GreenList { green: s.state.green_vertices()? }))
        .map(Json)
}

#[derive(Debug, Deserialize)]
pub struct CompletionQuery {
    pub limit: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Completion {
    /// Vertices to mutate from the current state.
    pub vertices: Vec<usize>,
    pub c_vectors: Vec<CVector>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Completions {
    pub completions: Vec<Completion>,
    pub truncated: bool,
    pub states_visited: u64,
}

pub const DEFAULT_COMPLETION_LIMIT: usize = 10;

async fn completions(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<CompletionQuery>,
) -> Result<Response, ApiError> {
    let (start, n) = app.with_session(&id, |s| Ok((s.state.clone(), s.problem.quiver.vertex_count())))?;
    let limit = q.limit.unwrap_or(DEFAULT_COMPLETION_LIMIT);
    let bounds = SearchBounds {
        max_len: start.history.len() + 4 * n.max(1),
        max_states: app.config.completion_budget,
    };
    let depth = start.history.len();
    let e = tokio::task::spawn_blocking(move || enumerate_from(&start, bounds, limit, &mut |_| {}))
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))??;
    let body = Completions {
        completions: e
            .sequences
            .into_iter()
            .map(|s| Completion {
                vertices: s.vertices[depth..].to_vec(),
                c_vectors: s.c_vectors[depth..].to_vec(),
            })
            .collect(),
        truncated: e.truncated.is_some(),
        states_visited: e.states_visited,
    };
    let status = if body.truncated {
        StatusCode::SERVICE_UNAVAILABLE
    } else {
        StatusCode::OK
    };
    Ok((status, Json(body)).into_response())
}

async fn delete(State(app): State<AppState>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    app.sweep();
    match app.sessions.lock().unwrap().remove(&id) {
        Some(_) => Ok(StatusCode::NO_CONTENT),
        None => Err(ApiError::UnknownSession(id)),
    }
}

pub fn router(app: AppState) -> Router {
    Router::new()
        .route("/presets", get(presets))
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(get_state).delete(delete))
        .route("/sessions/{id}/mutate", post(mutate))
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/green", get(green))
        .route("/sessions/{id}/completions", get(completions))
        .layer(CorsLayer::permissive())
        .with_state(app)
}

/// Serves until the process is stopped, sweeping idle sessions once a
/// minute.
pub async fn serve(addr: std::net::SocketAddr, config: Config) -> std::io::Result<()> {
    let app = AppState::new(config);
    let sweeper = app.clone();
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            sweeper.sweep();
        }
    });
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(app)).await
}
