//! Session-scoped HTTP/JSON access to the authoring workbench.
//!
//! Requests on one session are serialized by its mutex; engine work runs on
//! the blocking pool.

use std::sync::{Arc, Mutex};

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use cnlasp_cnl::frontend::FrontendError;
use cnlasp_cnl::{Assets, CnlError, LookaheadResult, MetaResult, ReifiedRule, Workbench, WorkbenchConfig};
use cnlasp_core::Status;
use dashmap::DashMap;
use serde::{Deserialize, Serialize};
use tower_http::cors::CorsLayer;
use uuid::Uuid;

pub const BIND_ENV: &str = "CNLASP_BIND";
pub const DEFAULT_BIND: &str = "127.0.0.1:8080";

#[derive(Clone)]
pub struct AppState {
    assets: Arc<Assets>,
    config: WorkbenchConfig,
    sessions: Arc<DashMap<String, Arc<Mutex<Workbench>>>>,
}

impl AppState {
    pub fn new(assets: Arc<Assets>, config: WorkbenchConfig) -> AppState {
        AppState {
            assets,
            config,
            sessions: Arc::new(DashMap::new()),
        }
    }

    pub fn session_count(&self) -> usize {
        self.sessions.len()
    }
}

impl Default for AppState {
    fn default() -> Self {
        AppState::new(Arc::new(Assets::builtin()), WorkbenchConfig::default())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error("no session {0}")]
    UnknownSession(String),
    #[error(transparent)]
    Cnl(#[from] CnlError),
    #[error("worker failed: {0}")]
    Worker(String),
}

#[derive(Serialize, Deserialize, Debug, PartialEq, Eq)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub position: Option<u32>,
}

fn error_kind(e: &CnlError) -> &'static str {
    match e {
        CnlError::Frontend(FrontendError::UnknownToken { .. }) => "UnknownToken",
        CnlError::NoContinuation { .. } => "NoContinuation",
        CnlError::NoParse { .. } => "NoParse",
        CnlError::AmbiguousParse { .. } => "AmbiguousParse",
        CnlError::NotOneSentence(_) => "NotOneSentence",
        CnlError::UnresolvedAnaphor { .. } => "UnresolvedAnaphor",
        CnlError::LexiconGap(_) => "LexiconGap",
        CnlError::Unsupported { .. } => "Unsupported",
        CnlError::Engine(_) => "Engine",
        _ => "Invalid",
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, error, position) = match &self {
            ApiError::UnknownSession(_) => (StatusCode::NOT_FOUND, "UnknownSession", None),
            ApiError::Cnl(e) => {
                let position = match e {
                    CnlError::Frontend(FrontendError::UnknownToken { position, .. }) => Some(*position),
                    _ => None,
                };
                (StatusCode::UNPROCESSABLE_ENTITY, error_kind(e), position)
            }
            ApiError::Worker(_) => (StatusCode::INTERNAL_SERVER_ERROR, "Worker", None),
        };
        let body = ErrorBody {
            error: error.to_owned(),
            message: self.to_string(),
            position,
        };
        (status, Json(body)).into_response()
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct RuleJson {
    pub id: i64,
    pub head: Option<String>,
    pub pbl: Vec<String>,
    pub nbl: Vec<String>,
    pub constraint: bool,
}

impl From<&ReifiedRule> for RuleJson {
    fn from(r: &ReifiedRule) -> Self {
        RuleJson {
            id: r.id,
            head: r.head.map(|h| h.to_string()),
            pbl: r.pbl.iter().map(|l| l.to_string()).collect(),
            nbl: r.nbl.iter().map(|l| l.to_string()).collect(),
            constraint: r.is_constraint,
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum StatusJson {
    Satisfiable,
    Unsatisfiable,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct ModelJson {
    pub status: StatusJson,
    /// `in_AS(..)` literals of the first answer set.
    pub model: Vec<String>,
    pub violated: Vec<i64>,
    pub inconsistent: bool,
    pub answer_sets: usize,
}

impl From<&MetaResult> for ModelJson {
    fn from(r: &MetaResult) -> Self {
        ModelJson {
            status: match r.status {
                Status::Satisfiable => StatusJson::Satisfiable,
                Status::Unsatisfiable => StatusJson::Unsatisfiable,
            },
            model: r.model.iter().map(|t| format!("in_AS({t})")).collect(),
            violated: r.violated.clone(),
            inconsistent: r.inconsistent,
            answer_sets: r.models.len(),
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct SuggestionJson {
    pub category: String,
    pub agreement: String,
    pub surfaces: Vec<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct LookaheadJson {
    pub depth_used: usize,
    pub fragments: usize,
    pub suggestions: Vec<SuggestionJson>,
}

impl From<&LookaheadResult> for LookaheadJson {
    fn from(r: &LookaheadResult) -> Self {
        LookaheadJson {
            depth_used: r.depth_used,
            fragments: r.fragments.len(),
            suggestions: r
                .suggestions
                .iter()
                .map(|s| SuggestionJson {
                    category: s.category.to_string(),
                    agreement: s.agreement.as_str().to_owned(),
                    surfaces: s.surfaces.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct CreatedJson {
    pub session_id: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct PrefixJson {
    pub prefix: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct TextJson {
    pub text: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct CommitJson {
    pub trees: usize,
    pub rules: Vec<RuleJson>,
    pub model: ModelJson,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct RetractJson {
    pub retracted: Option<String>,
    pub model: ModelJson,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct SentencesJson {
    pub sentences: Vec<String>,
}

pub fn app(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}/lookahead", post(lookahead))
        .route("/sessions/{id}/sentences", post(add_sentence).get(sentences))
        .route("/sessions/{id}/sentences/last", delete(retract))
        .route("/sessions/{id}/model", get(model))
        .route("/sessions/{id}/kb", get(kb))
        .layer(CorsLayer::permissive())
        .with_state(state)
}

fn session(state: &AppState, id: &str) -> Result<Arc<Mutex<Workbench>>, ApiError> {
    state
        .sessions
        .get(id)
        .map(|s| Arc::clone(s.value()))
        .ok_or_else(|| ApiError::UnknownSession(id.to_owned()))
}

/// Runs `f` on the session's workbench off the async executor.
async fn with_session<T: Send + 'static>(
    state: &AppState,
    id: &str,
    f: impl FnOnce(&mut Workbench) -> Result<T, CnlError> + Send + 'static,
) -> Result<T, ApiError> {
    let wb = session(state, id)?;
    tokio::task::spawn_blocking(move || {
        let mut guard = wb.lock().unwrap_or_else(|p| p.into_inner());
        f(&mut guard)
    })
    .await
    .map_err(|e| ApiError::Worker(e.to_string()))?
    .map_err(ApiError::from)
}

async fn create(State(state): State<AppState>) -> Result<Json<CreatedJson>, ApiError> {
    let wb = Workbench::new(Arc::clone(&state.assets), state.config.clone())?;
    let id = Uuid::new_v4().to_string();
    state.sessions.insert(id.clone(), Arc::new(Mutex::new(wb)));
    Ok(Json(CreatedJson { session_id: id }))
}

async fn lookahead(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Json(body): Json<PrefixJson>,
) -> Result<Json<LookaheadJson>, ApiError> {
    let r = with_session(&state, &id, move |wb| wb.lookahead(&body.prefix)).await?;
    Ok(Json(LookaheadJson::from(&r)))
}

async fn add_sentence(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Json(body): Json<TextJson>,
) -> Result<Json<CommitJson>, ApiError> {
    let c = with_session(&state, &id, move |wb| wb.add_sentence(&body.text)).await?;
    Ok(Json(CommitJson {
        trees: c.sentences.len(),
        rules: c.sentences.iter().flat_map(|s| s.rules.iter().map(RuleJson::from)).collect(),
        model: ModelJson::from(&c.result),
    }))
}

async fn sentences(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<SentencesJson>, ApiError> {
    let s = with_session(&state, &id, |wb| Ok(wb.sentences().iter().map(|c| c.text.clone()).collect())).await?;
    Ok(Json(SentencesJson { sentences: s }))
}

async fn retract(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<RetractJson>, ApiError> {
    let (retracted, model) = with_session(&state, &id, |wb| {
        let gone = wb.retract_last()?;
        Ok((gone.map(|c| c.text), ModelJson::from(wb.result())))
    })
    .await?;
    Ok(Json(RetractJson { retracted, model }))
}

async fn model(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<ModelJson>, ApiError> {
    Ok(Json(with_session(&state, &id, |wb| Ok(ModelJson::from(wb.result()))).await?))
}

async fn kb(State(state): State<AppState>, Path(id): Path<String>) -> Result<String, ApiError> {
    with_session(&state, &id, |wb| Ok(wb.kb_text())).await
}
