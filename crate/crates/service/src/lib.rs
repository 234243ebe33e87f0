//! HTTP facade over the task engine.
//!
//! Teaching is a two-step exchange: `POST /api/learn` returns a pending
//! proposal, `POST /api/approve` saves it. Proposals are held in memory and
//! expire after ten minutes.

pub mod api;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, MutexGuard};
use std::time::{Duration, Instant};

use axum::extract::rejection::{JsonRejection, PathRejection};
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use tower_http::services::ServeDir;

use helpa_core::{play, EnvSpec, Execution, MatchOptions, Task, TaskId, TaskStore};

use api::{
    ApiError, ApproveRequest, ApproveResponse, DeleteResponse, ErrorKind, ExecuteRequest, LearnRequest, LearnResponse,
    PlayRequest, TaskView,
};

pub const DEFAULT_PORT: u16 = 8787;
pub const PROPOSAL_TTL: Duration = Duration::from_secs(600);

const PLACEHOLDER_PAGE: &str = "<!doctype html>\n<html><head><meta charset=\"utf-8\"><title>helpa</title></head>\n\
<body><h1>helpa</h1><p>The API is served under <code>/api</code>.</p></body></html>\n";

struct Proposal {
    task: Task,
    created: Instant,
}

pub struct AppState {
    store: Mutex<TaskStore>,
    proposals: Mutex<HashMap<u64, Proposal>>,
    next_proposal: Mutex<u64>,
    env: Option<EnvSpec>,
    opts: MatchOptions,
    ttl: Duration,
}

impl AppState {
    pub fn new(store: TaskStore, env: Option<EnvSpec>, opts: MatchOptions) -> Self {
        AppState {
            store: Mutex::new(store),
            proposals: Mutex::new(HashMap::new()),
            next_proposal: Mutex::new(1),
            env,
            opts,
            ttl: PROPOSAL_TTL,
        }
    }

    pub fn with_ttl(mut self, ttl: Duration) -> Self {
        self.ttl = ttl;
        self
    }

    fn store(&self) -> MutexGuard<'_, TaskStore> {
        self.store.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// Pending proposals with expired ones dropped.
    fn proposals(&self) -> MutexGuard<'_, HashMap<u64, Proposal>> {
        let mut map = self.proposals.lock().unwrap_or_else(|e| e.into_inner());
        let ttl = self.ttl;
        map.retain(|_, p| p.created.elapsed() < ttl);
        map
    }
}

pub struct HttpError(ApiError);

impl From<ApiError> for HttpError {
    fn from(e: ApiError) -> Self {
        HttpError(e)
    }
}

impl From<JsonRejection> for HttpError {
    fn from(e: JsonRejection) -> Self {
        HttpError(ApiError::invalid_request(e.body_text()))
    }
}

impl From<PathRejection> for HttpError {
    fn from(e: PathRejection) -> Self {
        HttpError(ApiError::invalid_request(e.body_text()))
    }
}

pub fn status(kind: ErrorKind) -> StatusCode {
    match kind {
        ErrorKind::BadRequest => StatusCode::BAD_REQUEST,
        ErrorKind::Unprocessable => StatusCode::UNPROCESSABLE_ENTITY,
        ErrorKind::NotFound => StatusCode::NOT_FOUND,
        ErrorKind::Conflict => StatusCode::CONFLICT,
        ErrorKind::Unavailable => StatusCode::SERVICE_UNAVAILABLE,
        ErrorKind::Internal => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

impl IntoResponse for HttpError {
    fn into_response(self) -> Response {
        (status(self.0.kind), Json(self.0.body())).into_response()
    }
}

type Reply<T> = Result<Json<T>, HttpError>;

async fn learn(
    State(state): State<Arc<AppState>>,
    body: Result<Json<LearnRequest>, JsonRejection>,
) -> Reply<LearnResponse> {
    let Json(req) = body?;
    let script = api::parse_script(req.script)?;
    let (task, variables) = api::propose(&req.command, &script, state.opts)?;
    let template = task.template.render();
    let proposal_id = {
        let mut next = state.next_proposal.lock().unwrap_or_else(|e| e.into_inner());
        let id = *next;
        *next += 1;
        id
    };
    state.proposals().insert(
        proposal_id,
        Proposal {
            task,
            created: Instant::now(),
        },
    );
    Ok(Json(LearnResponse {
        proposal_id,
        template,
        variables,
    }))
}

async fn approve(
    State(state): State<Arc<AppState>>,
    body: Result<Json<ApproveRequest>, JsonRejection>,
) -> Reply<ApproveResponse> {
    let Json(req) = body?;
    let mut proposals = state.proposals();
    if !req.approve {
        return match proposals.remove(&req.proposal_id) {
            Some(_) => Ok(Json(ApproveResponse::default())),
            None => Err(ApiError::unknown_proposal(req.proposal_id).into()),
        };
    }
    let task = proposals
        .get(&req.proposal_id)
        .map(|p| p.task.clone())
        .ok_or_else(|| ApiError::unknown_proposal(req.proposal_id))?;
    // a conflict leaves the proposal pending so the client can retry with force
    let id = state.store().save(task, req.force).map_err(ApiError::from)?;
    proposals.remove(&req.proposal_id);
    Ok(Json(ApproveResponse { task_id: Some(id) }))
}

async fn execute(
    State(state): State<Arc<AppState>>,
    body: Result<Json<ExecuteRequest>, JsonRejection>,
) -> Reply<api::ExecuteResponse> {
    let Json(req) = body?;
    let tasks = state.store().snapshot();
    Ok(Json(api::execute(
        &req.command,
        &tasks,
        state.opts,
        Execution::default(),
    )?))
}

async fn list_tasks(State(state): State<Arc<AppState>>) -> Json<Vec<TaskView>> {
    Json(state.store().list().iter().map(TaskView::from).collect())
}

async fn delete_task(
    State(state): State<Arc<AppState>>,
    id: Result<Path<u64>, PathRejection>,
) -> Reply<DeleteResponse> {
    let Path(id) = id?;
    let removed = state.store().delete(TaskId(id)).map_err(ApiError::from)?;
    Ok(Json(DeleteResponse { deleted: removed.id }))
}

async fn get_env(State(state): State<Arc<AppState>>) -> Reply<EnvSpec> {
    state.env.clone().map(Json).ok_or_else(|| ApiError::no_env().into())
}

async fn play_script(
    State(state): State<Arc<AppState>>,
    body: Result<Json<PlayRequest>, JsonRejection>,
) -> Reply<helpa_core::ExecutionTrace> {
    let Json(req) = body?;
    let env = state.env.as_ref().ok_or_else(ApiError::no_env)?;
    Ok(Json(play(env, &req.script)))
}

async fn placeholder() -> Html<&'static str> {
    Html(PLACEHOLDER_PAGE)
}

/// The API routes, with static assets from `static_dir` at `/` when given.
pub fn router(state: Arc<AppState>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/learn", post(learn))
        .route("/api/approve", post(approve))
        .route("/api/execute", post(execute))
        .route("/api/tasks", get(list_tasks))
        .route("/api/tasks/{id}", delete(delete_task))
        .route("/api/env", get(get_env))
        .route("/api/play", post(play_script))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(placeholder)),
    }
}

/// Serves `app` on `addr` until the process is stopped.
pub async fn serve(addr: SocketAddr, app: Router) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app).await
}
