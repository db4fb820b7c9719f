//! HTTP routes. Field names are documented in `docs/API.md`.

use std::sync::Arc;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use indic_dbcs::codec::Fallback;
use indic_dbcs::Script;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use uuid::Uuid;

use crate::ops::{self, ImeState, ServiceError};
use crate::registry::{ResourceEntry, ResourceRegistry};
use crate::session::SessionStore;

pub const PBM_CONTENT_TYPE: &str = "image/x-portable-bitmap";

#[derive(Debug)]
pub struct AppState {
    pub registry: ResourceRegistry,
    pub sessions: SessionStore,
}

impl AppState {
    pub fn new(registry: ResourceRegistry, idle: Duration) -> Self {
        let sessions = SessionStore::new(registry.resources().ime.clone(), idle);
        AppState { registry, sessions }
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match self {
            ServiceError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ServiceError::UnknownSession(_) => StatusCode::NOT_FOUND,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        (status, Json(ErrorBody { error: self.name().to_string(), message: self.to_string() })).into_response()
    }
}

fn parse_json<T: DeserializeOwned>(body: &[u8]) -> Result<T, ServiceError> {
    serde_json::from_slice(body).map_err(|e| ServiceError::BadRequest(format!("malformed body: {e}")))
}

fn parse_script(name: &str) -> Result<Script, ServiceError> {
    name.parse().map_err(|_| ServiceError::BadRequest(format!("unknown script {name:?}")))
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/ime/session", post(create_session))
        .route("/ime/{id}", get(session_state))
        .route("/ime/{id}/key", post(key))
        .route("/ime/{id}/select", post(select))
        .route("/ime/{id}/backspace", post(backspace))
        .route("/ime/{id}/commit", post(commit))
        .route("/render", post(render))
        .route("/gloss", post(gloss))
        .route("/translit", post(translit))
        .route("/encode", post(encode))
        .route("/decode", post(decode))
        .route("/interchange", post(interchange))
        .route("/resources", get(resources))
        .with_state(state)
}

/// Serves until the listener fails.
pub async fn serve(listener: tokio::net::TcpListener, state: Arc<AppState>) -> std::io::Result<()> {
    axum::serve(listener, router(state)).await
}

fn with_session(
    state: &AppState,
    id: &str,
    f: impl FnOnce(&mut indic_dbcs::ime::ImeSession) -> Result<(), ServiceError>,
) -> Result<Json<ImeState>, ServiceError> {
    let unknown = || ServiceError::UnknownSession(id.to_string());
    let uuid: Uuid = id.parse().map_err(|_| unknown())?;
    let table = state.registry.resources().table.clone();
    state
        .sessions
        .with(uuid, |s| f(s).map(|()| Json(ops::ime_state(id, s, &table))))
        .ok_or_else(unknown)?
}

async fn create_session(State(state): State<Arc<AppState>>) -> (StatusCode, Json<ImeState>) {
    let (id, session) = state.sessions.create();
    (StatusCode::CREATED, Json(ops::ime_state(&id.to_string(), &session, &state.registry.resources().table)))
}

async fn session_state(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<ImeState>, ServiceError> {
    with_session(&state, &id, |_| Ok(()))
}

#[derive(Debug, Deserialize, Serialize)]
pub struct KeyRequest {
    pub key: String,
}

async fn key(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<ImeState>, ServiceError> {
    let req: KeyRequest = parse_json(&body)?;
    let mut chars = req.key.chars();
    let (Some(k), None) = (chars.next(), chars.next()) else {
        return Err(ServiceError::BadRequest("key must be exactly one character".into()));
    };
    with_session(&state, &id, |s| s.feed_key(k).map(|_| ()).map_err(Into::into))
}

#[derive(Debug, Deserialize, Serialize)]
pub struct SelectRequest {
    pub index: usize,
}

async fn select(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<ImeState>, ServiceError> {
    let req: SelectRequest = parse_json(&body)?;
    with_session(&state, &id, |s| s.select(req.index).map(|_| ()).map_err(Into::into))
}

async fn backspace(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<ImeState>, ServiceError> {
    with_session(&state, &id, |s| {
        s.backspace();
        Ok(())
    })
}

async fn commit(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<ImeState>, ServiceError> {
    with_session(&state, &id, |s| {
        s.commit_raw();
        Ok(())
    })
}

#[derive(Debug, Deserialize, Serialize)]
pub struct RenderRequest {
    pub text: String,
    #[serde(default = "default_size")]
    pub size: u16,
}

fn default_size() -> u16 {
    16
}

async fn render(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Response, ServiceError> {
    let req: RenderRequest = parse_json(&body)?;
    let pbm = ops::render(state.registry.resources(), &req.text, req.size)?;
    Ok(([(header::CONTENT_TYPE, PBM_CONTENT_TYPE)], pbm).into_response())
}

#[derive(Debug, Deserialize, Serialize)]
pub struct GlossRequest {
    pub pair: String,
    pub sentence: String,
}

#[derive(Debug, Deserialize, Serialize, PartialEq, Eq)]
pub struct GlossResponse {
    pub pair: String,
    pub gloss: String,
}

async fn gloss(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Json<GlossResponse>, ServiceError> {
    let req: GlossRequest = parse_json(&body)?;
    let gloss = ops::gloss(state.registry.resources(), &req.pair, &req.sentence)?;
    Ok(Json(GlossResponse { pair: req.pair, gloss }))
}

#[derive(Debug, Deserialize, Serialize)]
pub struct TranslitRequest {
    pub text: String,
    pub from: String,
    pub to: String,
    #[serde(default)]
    pub fallback: Option<String>,
}

#[derive(Debug, Deserialize, Serialize, PartialEq, Eq)]
pub struct TextResponse {
    pub text: String,
}

async fn translit(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Json<TextResponse>, ServiceError> {
    let req: TranslitRequest = parse_json(&body)?;
    let from = parse_script(&req.from)?;
    let to = parse_script(&req.to)?;
    let fallback: Fallback = match &req.fallback {
        Some(f) => f.parse().map_err(ServiceError::BadRequest)?,
        None => Fallback::default(),
    };
    let text = ops::translit(state.registry.resources(), &req.text, from, to, fallback)?;
    Ok(Json(TextResponse { text }))
}

fn octets(bytes: Vec<u8>) -> Response {
    ([(header::CONTENT_TYPE, "application/octet-stream")], bytes).into_response()
}

async fn encode(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Response, ServiceError> {
    let text = std::str::from_utf8(&body).map_err(|e| ServiceError::BadRequest(format!("body is not UTF-8: {e}")))?;
    Ok(octets(ops::encode(state.registry.resources(), text)?))
}

#[derive(Debug, Default, Deserialize)]
pub struct DecodeParams {
    #[serde(default)]
    pub lossy: bool,
}

async fn decode(
    State(state): State<Arc<AppState>>,
    Query(params): Query<DecodeParams>,
    body: Bytes,
) -> Result<Response, ServiceError> {
    let text = ops::decode(state.registry.resources(), &body, params.lossy)?;
    Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], text).into_response())
}

#[derive(Debug, Default, Deserialize)]
pub struct InterchangeParams {
    #[serde(default)]
    pub reverse: bool,
}

async fn interchange(Query(params): Query<InterchangeParams>, body: Bytes) -> Result<Response, ServiceError> {
    Ok(octets(ops::interchange(&body, params.reverse)?))
}

#[derive(Debug, Serialize)]
pub struct ResourcesResponse<'a> {
    pub resources: &'a [ResourceEntry],
}

async fn resources(State(state): State<Arc<AppState>>) -> Response {
    Json(ResourcesResponse { resources: state.registry.entries() }).into_response()
}
