//! HTTP facade over the solvers.
//!
//! | method | path                              | body                         |
//! |--------|-----------------------------------|------------------------------|
//! | GET    | `/api/problems`                   |                              |
//! | POST   | `/api/problems[?id=ID]`           | problem document             |
//! | GET    | `/api/problems/{id}`              |                              |
//! | PUT    | `/api/problems/{id}`              | `{"revision", "document"}`   |
//! | POST   | `/api/problems/{id}/rank`         | [`RankRequest`]              |
//! | POST   | `/api/problems/{id}/compose`      | [`ComposeRequest`]           |
//! | POST   | `/api/problems/{id}/knapsack`     | [`KnapsackRequest`]          |
//! | POST   | `/api/problems/{id}/trajectory`   | [`TrajectoryRequest`]        |
//! | POST   | `/api/problems/{id}/whatif`       | [`WhatIfRequest`]            |
//!
//! Solve endpoints never write; their responses carry the revision they were
//! computed from. Errors are [`ErrorBody`] with 400 (bad document or
//! request), 404 (unknown id), 409 (stale revision) or 422 (infeasible, with
//! diagnostics).

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use morphsynth::{parse_problem, ProblemDocument};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use tower_http::services::ServeDir;

use crate::error::{AppError, ErrorBody, FailureClass};
use crate::solve::{
    run_compose, run_knapsack, run_rank, run_trajectory, run_what_if, ComposeRequest, KnapsackRequest, RankRequest,
    TrajectoryRequest, WhatIfRequest,
};
use crate::store::{ProblemStore, ProblemSummary, StoredProblem};

/// A solve result tagged with the problem revision it was computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solved<T> {
    pub id: String,
    pub revision: u64,
    pub result: T,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PutBody<'a> {
    revision: u64,
    #[serde(borrow)]
    document: &'a RawValue,
}

#[derive(Debug, Deserialize)]
struct CreateQuery {
    id: Option<String>,
}

impl IntoResponse for AppError {
    fn into_response(self) -> Response {
        let status = match self.class() {
            FailureClass::InvalidProblem | FailureClass::BadRequest => StatusCode::BAD_REQUEST,
            FailureClass::Infeasible => StatusCode::UNPROCESSABLE_ENTITY,
            FailureClass::NotFound => StatusCode::NOT_FOUND,
            FailureClass::Conflict => StatusCode::CONFLICT,
            FailureClass::Io => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(ErrorBody::from(&self))).into_response()
    }
}

const PLACEHOLDER: &str = "<!doctype html>\n<title>morphsynth</title>\n<p>The workbench UI is not built. The API is served under <code>/api/problems</code>.</p>\n";

/// Routes over `store`. With `ui_dir`, static files from it are served for
/// every path outside `/api`; otherwise `/` returns a placeholder page.
pub fn router(store: Arc<ProblemStore>, ui_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/problems", get(list).post(create))
        .route("/api/problems/{id}", get(fetch).put(replace))
        .route("/api/problems/{id}/rank", post(rank))
        .route("/api/problems/{id}/compose", post(compose))
        .route("/api/problems/{id}/knapsack", post(knapsack))
        .route("/api/problems/{id}/trajectory", post(trajectory))
        .route("/api/problems/{id}/whatif", post(whatif))
        .with_state(store);
    match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(|| async { Html(PLACEHOLDER) })),
    }
}

pub async fn serve(store: Arc<ProblemStore>, ui_dir: Option<PathBuf>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(store, ui_dir)).await
}

/// An empty body stands for `{}`, so requests with all-default fields may
/// omit it.
fn request<T: DeserializeOwned>(bytes: &[u8]) -> Result<T, AppError> {
    let bytes = if bytes.iter().all(u8::is_ascii_whitespace) { b"{}".as_slice() } else { bytes };
    serde_json::from_slice(bytes).map_err(|e| AppError::BadRequest(format!("request body: {e}")))
}

async fn list(State(store): State<Arc<ProblemStore>>) -> Json<Vec<ProblemSummary>> {
    Json(store.list())
}

async fn create(
    State(store): State<Arc<ProblemStore>>,
    Query(q): Query<CreateQuery>,
    body: Bytes,
) -> Result<(StatusCode, Json<StoredProblem>), AppError> {
    let document = parse_problem(&body)?;
    let stored = store.create(q.id.as_deref(), document)?;
    Ok((StatusCode::CREATED, Json(stored.as_ref().clone())))
}

async fn fetch(State(store): State<Arc<ProblemStore>>, Path(id): Path<String>) -> Result<Json<StoredProblem>, AppError> {
    Ok(Json(store.get(&id)?.as_ref().clone()))
}

async fn replace(
    State(store): State<Arc<ProblemStore>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<StoredProblem>, AppError> {
    store.get(&id)?;
    let put: PutBody = serde_json::from_slice(&body).map_err(|e| AppError::BadRequest(format!("request body: {e}")))?;
    let document = parse_problem(put.document.get().as_bytes())?;
    Ok(Json(store.update(&id, put.revision, document)?.as_ref().clone()))
}

async fn solve<Req, Res>(
    store: &ProblemStore,
    id: &str,
    body: &[u8],
    run: fn(&ProblemDocument, &Req) -> Result<Res, AppError>,
) -> Result<Json<Solved<Res>>, AppError>
where
    Req: DeserializeOwned + Send + 'static,
    Res: Serialize + Send + 'static,
{
    let problem = store.get(id)?;
    let req: Req = request(body)?;
    let (id, revision) = (problem.id.clone(), problem.revision);
    let result = tokio::task::spawn_blocking(move || run(&problem.document, &req))
        .await
        .map_err(|e| AppError::Io(format!("solver task failed: {e}")))??;
    Ok(Json(Solved { id, revision, result }))
}

async fn rank(State(s): State<Arc<ProblemStore>>, Path(id): Path<String>, body: Bytes) -> Response {
    solve::<RankRequest, _>(&s, &id, &body, run_rank).await.into_response()
}

async fn compose(State(s): State<Arc<ProblemStore>>, Path(id): Path<String>, body: Bytes) -> Response {
    solve::<ComposeRequest, _>(&s, &id, &body, run_compose).await.into_response()
}

async fn knapsack(State(s): State<Arc<ProblemStore>>, Path(id): Path<String>, body: Bytes) -> Response {
    solve::<KnapsackRequest, _>(&s, &id, &body, run_knapsack).await.into_response()
}

async fn trajectory(State(s): State<Arc<ProblemStore>>, Path(id): Path<String>, body: Bytes) -> Response {
    solve::<TrajectoryRequest, _>(&s, &id, &body, run_trajectory).await.into_response()
}

async fn whatif(State(s): State<Arc<ProblemStore>>, Path(id): Path<String>, body: Bytes) -> Response {
    solve::<WhatIfRequest, _>(&s, &id, &body, run_what_if).await.into_response()
}
