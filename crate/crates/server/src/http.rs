//! HTTP+JSON facade.
//!
//! Personal endpoints identify the caller by the `X-User` header. Every
//! error response has the body `{"http_status":N,"code":"...","message":"..."}`
//! with one of these codes:
//!
//! | status | codes |
//! |--------|-------|
//! | 400 | `bad_request`, `invalid_url`, `empty_tag`, `empty_tag_set`, `invalid_user`, `invalid_filter`, `no_centers` |
//! | 401 | `missing_user` |
//! | 404 | `not_found`, `unknown_tag`, `unknown_center` |
//! | 409 | `not_in_collection` |
//! | 500 | `storage_error`, `internal` |

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{FromRequest, RawQuery, Request, State};
use axum::handler::HandlerWithoutStateExt;
use axum::http::header::{CONTENT_TYPE, HOST};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{Html, IntoResponse, Redirect, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tagmap_core::{
    build_cloud, build_context, canonicalize_url, compute_stats, node_actions, normalize_tag,
    recommend_tags, related_tags, render_report, sessionize, similar_resources, Action, ClickEvent,
    CloudConfig, ContextError, ContextNode, FilterParams, FolksonomyError, Mode, NodeAction,
    NodeRef, PopularityScope, ResourceId, TagLabel, UserId, ViewMode,
};
use tower_http::services::{ServeDir, ServeFile};

use crate::service::{Service, ServiceError};

pub const USER_HEADER: &str = "x-user";

#[derive(Debug, Clone)]
pub struct HttpConfig {
    pub default_filter: FilterParams,
    pub session_gap: u64,
    pub cloud: CloudConfig,
    pub static_dir: Option<PathBuf>,
}

impl Default for HttpConfig {
    fn default() -> Self {
        HttpConfig {
            default_filter: FilterParams::default(),
            session_gap: tagmap_core::sessions::DEFAULT_GAP_SECS,
            cloud: CloudConfig::default(),
            static_dir: None,
        }
    }
}

#[derive(Clone)]
struct Ctx {
    service: Arc<Service>,
    config: Arc<HttpConfig>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    pub http_status: u16,
    pub code: String,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            http_status: status.as_u16(),
            code: code.to_string(),
            message: message.into(),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    fn not_found(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "not_found", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status =
            StatusCode::from_u16(self.http_status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

impl From<FolksonomyError> for ApiError {
    fn from(e: FolksonomyError) -> Self {
        let (status, code) = match &e {
            FolksonomyError::EmptyTag => (StatusCode::BAD_REQUEST, "empty_tag"),
            FolksonomyError::EmptyTagSet => (StatusCode::BAD_REQUEST, "empty_tag_set"),
            FolksonomyError::InvalidUrl(_) => (StatusCode::BAD_REQUEST, "invalid_url"),
            FolksonomyError::InvalidUser(_) => (StatusCode::BAD_REQUEST, "invalid_user"),
            FolksonomyError::NotInCollection { .. } => (StatusCode::CONFLICT, "not_in_collection"),
            FolksonomyError::UnknownTag { .. } => (StatusCode::NOT_FOUND, "unknown_tag"),
        };
        ApiError::new(status, code, e.to_string())
    }
}

impl From<ContextError> for ApiError {
    fn from(e: ContextError) -> Self {
        let (status, code) = match &e {
            ContextError::NoCenters => (StatusCode::BAD_REQUEST, "no_centers"),
            ContextError::UnknownCenter(_) => (StatusCode::NOT_FOUND, "unknown_center"),
            ContextError::InvalidFilter(_) => (StatusCode::BAD_REQUEST, "invalid_filter"),
        };
        ApiError::new(status, code, e.to_string())
    }
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        match e {
            ServiceError::Folksonomy(e) => e.into(),
            ServiceError::Context(e) => e.into(),
            ServiceError::Journal(e) => {
                tracing::error!("journal: {e}");
                ApiError::new(
                    StatusCode::INTERNAL_SERVER_ERROR,
                    "storage_error",
                    e.to_string(),
                )
            }
            ServiceError::Snapshot(e) => {
                tracing::error!("snapshot: {e}");
                ApiError::new(
                    StatusCode::INTERNAL_SERVER_ERROR,
                    "storage_error",
                    e.to_string(),
                )
            }
        }
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// JSON body whose rejections are reported as `ApiError`s.
struct Body<T>(T);

impl<S: Send + Sync, T: DeserializeOwned> FromRequest<S> for Body<T> {
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, ApiError> {
        Json::<T>::from_request(req, state)
            .await
            .map(|Json(v)| Body(v))
            .map_err(|e| ApiError::bad_request(e.body_text()))
    }
}

/// Decoded query string. Repeated keys are kept in order.
struct Params(Vec<(String, String)>);

impl Params {
    fn parse(raw: Option<String>) -> Self {
        let raw = raw.unwrap_or_default();
        Params(
            url::form_urlencoded::parse(raw.as_bytes())
                .into_owned()
                .collect(),
        )
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.0
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    fn require(&self, key: &str) -> ApiResult<&str> {
        self.get(key)
            .ok_or_else(|| ApiError::bad_request(format!("missing query parameter {key:?}")))
    }

    /// Every value of `key`, each split on commas, blanks dropped.
    fn list(&self, key: &str) -> Vec<&str> {
        self.0
            .iter()
            .filter(|(k, _)| k == key)
            .flat_map(|(_, v)| v.split(','))
            .filter(|s| !s.trim().is_empty())
            .collect()
    }

    fn every(&self, key: &str) -> Vec<&str> {
        self.0
            .iter()
            .filter(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .collect()
    }

    fn number<T: std::str::FromStr>(&self, key: &str, default: T) -> ApiResult<T> {
        match self.get(key) {
            None | Some("") => Ok(default),
            Some(v) => v.trim().parse().map_err(|_| {
                ApiError::bad_request(format!("{key} must be a non-negative integer, got {v:?}"))
            }),
        }
    }

    fn flag(&self, key: &str, default: bool) -> ApiResult<bool> {
        match self.get(key) {
            None | Some("") => Ok(default),
            Some("true" | "1") => Ok(true),
            Some("false" | "0") => Ok(false),
            Some(v) => Err(ApiError::bad_request(format!(
                "{key} must be true or false, got {v:?}"
            ))),
        }
    }
}

fn user(headers: &HeaderMap) -> ApiResult<UserId> {
    let raw = headers.get(USER_HEADER).ok_or_else(|| {
        ApiError::new(
            StatusCode::UNAUTHORIZED,
            "missing_user",
            "X-User header is required",
        )
    })?;
    let raw = raw.to_str().map_err(|_| {
        ApiError::new(
            StatusCode::BAD_REQUEST,
            "invalid_user",
            "X-User is not valid text",
        )
    })?;
    Ok(UserId::new(raw)?)
}

fn scope(params: &Params, headers: &HeaderMap) -> ApiResult<PopularityScope> {
    match params.get("scope").unwrap_or("personal") {
        "personal" => Ok(PopularityScope::Personal(user(headers)?)),
        "global" => Ok(PopularityScope::Global),
        other => Err(ApiError::bad_request(format!(
            "scope must be personal or global, got {other:?}"
        ))),
    }
}

fn resource(raw: &str) -> ApiResult<ResourceId> {
    Ok(canonicalize_url(raw)?)
}

/// Runs a journaled write off the async runtime.
async fn write<T: Send + 'static>(
    ctx: &Ctx,
    f: impl FnOnce(&Service) -> Result<T, ServiceError> + Send + 'static,
) -> ApiResult<T> {
    let service = ctx.service.clone();
    tokio::task::spawn_blocking(move || f(&service))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
        .map_err(ApiError::from)
}

pub fn router(service: Arc<Service>, config: HttpConfig) -> Router {
    let app = match &config.static_dir {
        Some(dir) if dir.join("index.html").is_file() => Router::new()
            .fallback_service(ServeDir::new(dir).fallback(ServeFile::new(dir.join("index.html")))),
        Some(dir) => {
            Router::new().fallback_service(ServeDir::new(dir).fallback(placeholder.into_service()))
        }
        None => Router::new().fallback(placeholder),
    };
    let ctx = Ctx {
        service,
        config: Arc::new(config),
    };
    Router::new()
        .route("/", get(|| async { Redirect::to("/app/") }))
        .route("/api/annotations", post(post_annotation))
        .route(
            "/api/resources",
            get(list_resources).delete(delete_resource),
        )
        .route("/api/resources/tags", put(put_tags))
        .route("/api/resources/title", put(put_title))
        .route("/api/tags/rename", post(rename_tag))
        .route("/api/cloud", get(cloud))
        .route("/api/context", get(context))
        .route("/api/recommend", get(recommend))
        .route("/api/related_tags", get(related))
        .route("/api/similar", get(similar))
        .route("/api/events", post(post_events))
        .route("/api/stats", get(stats))
        .route("/bookmarklet.js", get(bookmarklet))
        .nest_service("/app", app)
        .fallback(|| async { ApiError::not_found("no such endpoint") })
        .method_not_allowed_fallback(|| async {
            ApiError::new(
                StatusCode::BAD_REQUEST,
                "bad_request",
                "method not allowed for this endpoint",
            )
        })
        .with_state(ctx)
}

#[derive(Deserialize)]
struct AddBody {
    url: String,
    #[serde(default)]
    title: String,
    tags: Vec<String>,
}

#[derive(Deserialize)]
struct DragBody {
    dragged: NodeRef,
    target: NodeRef,
}

fn from_value<T: DeserializeOwned>(v: Value) -> ApiResult<T> {
    serde_json::from_value(v).map_err(|e| ApiError::bad_request(e.to_string()))
}

/// Adds an annotation (`{url, title, tags}`) or performs a drag-and-drop
/// (`{dragged, target}`).
async fn post_annotation(
    State(ctx): State<Ctx>,
    headers: HeaderMap,
    Body(body): Body<Value>,
) -> ApiResult<Response> {
    let user = user(&headers)?;
    if body.get("dragged").is_some() {
        let DragBody { dragged, target } = from_value(body)?;
        let effect = write(&ctx, move |s| s.drag(&user, &dragged, &target)).await?;
        return Ok(Json(json!({ "effect": effect })).into_response());
    }
    let AddBody { url, title, tags } = from_value(body)?;
    let created = write(&ctx, move |s| s.add_annotation(&user, &url, &title, &tags)).await?;
    Ok(Json(created).into_response())
}

async fn delete_resource(
    State(ctx): State<Ctx>,
    headers: HeaderMap,
    RawQuery(q): RawQuery,
) -> ApiResult<Json<Value>> {
    let user = user(&headers)?;
    let r = resource(Params::parse(q).require("url")?)?;
    let removed = write(&ctx, move |s| s.remove_resource(&user, &r)).await?;
    Ok(Json(json!({ "removed": removed })))
}

#[derive(Deserialize)]
struct TagsBody {
    url: String,
    tags: Vec<String>,
}

async fn put_tags(
    State(ctx): State<Ctx>,
    headers: HeaderMap,
    Body(body): Body<TagsBody>,
) -> ApiResult<Json<Value>> {
    let user = user(&headers)?;
    let r = resource(&body.url)?;
    let (added, removed) = write(&ctx, move |s| s.set_tags(&user, &r, &body.tags)).await?;
    Ok(Json(json!({ "added": added, "removed": removed })))
}

#[derive(Deserialize)]
struct TitleBody {
    url: String,
    title: String,
}

async fn put_title(
    State(ctx): State<Ctx>,
    headers: HeaderMap,
    Body(body): Body<TitleBody>,
) -> ApiResult<Json<Value>> {
    let user = user(&headers)?;
    let r = resource(&body.url)?;
    let (u, id) = (user.clone(), r.clone());
    write(&ctx, move |s| s.set_title(&u, &r, &body.title)).await?;
    let title = ctx
        .service
        .read(|st| st.store.title(&user, &id).map(str::to_string));
    Ok(Json(json!({ "resource": id, "title": title })))
}

#[derive(Deserialize)]
struct RenameBody {
    old: String,
    new: String,
}

async fn rename_tag(
    State(ctx): State<Ctx>,
    headers: HeaderMap,
    Body(body): Body<RenameBody>,
) -> ApiResult<Json<Value>> {
    let user = user(&headers)?;
    let old = normalize_tag(&body.old)?;
    let renamed = write(&ctx, move |s| s.rename_tag(&user, &old, &body.new)).await?;
    Ok(Json(json!({ "renamed": renamed })))
}

async fn cloud(
    State(ctx): State<Ctx>,
    headers: HeaderMap,
    RawQuery(q): RawQuery,
) -> ApiResult<Response> {
    let params = Params::parse(q);
    let scope = scope(&params, &headers)?;
    let cfg = ctx
        .config
        .cloud
        .with_max_tags(params.number("max", ctx.config.cloud.max_tags())?)
        .map_err(|e| ApiError::bad_request(e.to_string()))?;
    let tags = ctx
        .service
        .read(|s| build_cloud(&s.store.tag_counts(&scope), &cfg));
    Ok(Json(tags).into_response())
}

#[derive(Serialize)]
struct NodeView<'a> {
    #[serde(flatten)]
    node: &'a ContextNode,
    actions: Vec<NodeAction>,
}

fn filter_from(params: &Params, defaults: &FilterParams) -> ApiResult<FilterParams> {
    let filter = FilterParams {
        depth: params.number("depth", defaults.depth)?,
        max_neighbors: params.number("max_neighbors", defaults.max_neighbors)?,
        max_nodes: params.number("max_nodes", defaults.max_nodes)?,
        extra_tags: params
            .list("extra_tags")
            .into_iter()
            .map(normalize_tag)
            .collect::<Result<BTreeSet<TagLabel>, _>>()?,
    };
    filter.validate()?;
    Ok(filter)
}

/// Centers come from `centers` (tags, comma-separated, repeatable) and
/// `url` (resources, repeatable).
async fn context(
    State(ctx): State<Ctx>,
    headers: HeaderMap,
    RawQuery(q): RawQuery,
) -> ApiResult<Json<Value>> {
    let user = user(&headers)?;
    let params = Params::parse(q);
    let view = match params.get("view").unwrap_or("personal") {
        "personal" => ViewMode::Personal,
        "social" => ViewMode::Social,
        other => {
            return Err(ApiError::bad_request(format!(
                "view must be personal or social, got {other:?}"
            )))
        }
    };
    let mut centers = Vec::new();
    for t in params.list("centers") {
        centers.push(NodeRef::Tag(normalize_tag(t)?));
    }
    for u in params.every("url") {
        centers.push(NodeRef::Resource(resource(u)?));
    }
    let filter = filter_from(&params, &ctx.config.default_filter)?;
    let graph = ctx
        .service
        .read(|s| build_context(&s.store, &user, &centers, view, &filter))?;
    let nodes: Vec<NodeView> = graph
        .nodes
        .iter()
        .map(|node| NodeView {
            node,
            actions: node_actions(node),
        })
        .collect();
    Ok(Json(json!({
        "view": view,
        "centers": graph.centers,
        "nodes": nodes,
        "edges": graph.edges,
    })))
}

#[derive(Serialize)]
struct ListedResource {
    resource: ResourceId,
    weight: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    title: Option<String>,
    tags: Vec<TagLabel>,
}

/// List mode: resources carrying the selected tags. Personal listings show
/// the caller's title and tags, global ones everybody's.
async fn list_resources(
    State(ctx): State<Ctx>,
    headers: HeaderMap,
    RawQuery(q): RawQuery,
) -> ApiResult<Json<Vec<ListedResource>>> {
    let params = Params::parse(q);
    let scope = scope(&params, &headers)?;
    let tags = params
        .list("tags")
        .into_iter()
        .map(normalize_tag)
        .collect::<Result<BTreeSet<TagLabel>, _>>()?;
    let conjunctive = params.flag("conjunctive", true)?;
    let listed = ctx.service.read(|s| {
        s.store
            .resources_for_tags(&scope, &tags, conjunctive)
            .into_iter()
            .map(|(resource, weight)| {
                let (title, tags) = match &scope {
                    PopularityScope::Personal(u) => (
                        s.store.title(u, &resource).map(str::to_string),
                        s.store.user_tags_on(u, &resource).into_iter().collect(),
                    ),
                    PopularityScope::Global => (
                        s.store
                            .resource_meta(&resource)
                            .and_then(|m| m.titles.into_values().next()),
                        s.store.tags_on(&resource).into_iter().cloned().collect(),
                    ),
                };
                ListedResource {
                    resource,
                    weight,
                    title,
                    tags,
                }
            })
            .collect()
    });
    Ok(Json(listed))
}

const DEFAULT_K: usize = 10;

async fn recommend(
    State(ctx): State<Ctx>,
    headers: HeaderMap,
    RawQuery(q): RawQuery,
) -> ApiResult<Response> {
    let user = user(&headers)?;
    let params = Params::parse(q);
    let url = resource(params.require("url")?)?;
    let k = params.number("k", DEFAULT_K)?;
    let tags = ctx
        .service
        .read(|s| recommend_tags(&s.store, &user, &url, k));
    Ok(Json(tags).into_response())
}

async fn related(State(ctx): State<Ctx>, RawQuery(q): RawQuery) -> ApiResult<Response> {
    let params = Params::parse(q);
    let tag = normalize_tag(params.require("tag")?)?;
    let k = params.number("k", DEFAULT_K)?;
    let tags = ctx.service.read(|s| related_tags(&s.store, &tag, k));
    Ok(Json(tags).into_response())
}

async fn similar(State(ctx): State<Ctx>, RawQuery(q): RawQuery) -> ApiResult<Response> {
    let params = Params::parse(q);
    let url = resource(params.require("url")?)?;
    let k = params.number("k", DEFAULT_K)?;
    let found = ctx.service.read(|s| similar_resources(&s.store, &url, k));
    Ok(Json(found).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EventBody {
    at: i64,
    mode: Mode,
    action: Action,
    #[serde(default)]
    user: Option<String>,
}

/// Batch click ingestion. Events belong to the `X-User` caller.
async fn post_events(
    State(ctx): State<Ctx>,
    headers: HeaderMap,
    Body(batch): Body<Vec<EventBody>>,
) -> ApiResult<Json<Value>> {
    let user = user(&headers)?;
    let mut events = Vec::with_capacity(batch.len());
    for e in batch {
        if e.user.as_deref().is_some_and(|u| u.trim() != user.as_str()) {
            return Err(ApiError::bad_request("event user does not match X-User"));
        }
        events.push(ClickEvent {
            user: user.clone(),
            at: e.at,
            mode: e.mode,
            action: e.action,
        });
    }
    let accepted = write(&ctx, move |s| s.record_events(events)).await?;
    Ok(Json(json!({ "accepted": accepted })))
}

async fn stats(State(ctx): State<Ctx>, RawQuery(q): RawQuery) -> ApiResult<Response> {
    let params = Params::parse(q);
    let gap = params.number("gap", ctx.config.session_gap)?;
    let stats = ctx
        .service
        .read(|s| compute_stats(&sessionize(&s.events, gap)));
    match params.get("format").unwrap_or("json") {
        "json" => Ok(Json(stats).into_response()),
        "text" => Ok((
            [(CONTENT_TYPE, "text/plain; charset=utf-8")],
            render_report(&stats),
        )
            .into_response()),
        other => Err(ApiError::bad_request(format!(
            "format must be json or text, got {other:?}"
        ))),
    }
}

fn origin(headers: &HeaderMap) -> String {
    let host = headers
        .get(HOST)
        .and_then(|h| h.to_str().ok())
        .unwrap_or("localhost");
    format!("http://{host}")
}

/// Script that opens the contextual map of the page it runs on.
pub fn bookmarklet_script(origin: &str) -> String {
    format!(
        "(function(){{window.open('{origin}/app/context?url='+encodeURIComponent(location.href),'_blank');}})();\n"
    )
}

async fn bookmarklet(headers: HeaderMap) -> Response {
    (
        [(CONTENT_TYPE, "application/javascript; charset=utf-8")],
        bookmarklet_script(&origin(&headers)),
    )
        .into_response()
}

async fn placeholder(headers: HeaderMap) -> Html<String> {
    let origin = origin(&headers);
    let install = format!(
        "javascript:(function(){{var s=document.createElement('script');s.src='{origin}/bookmarklet.js';document.body.appendChild(s);}})();"
    );
    Html(format!(
        "<!doctype html>\n<html><head><meta charset=\"utf-8\"><title>tagmap</title></head><body>\n\
         <h1>tagmap</h1>\n<p>No UI assets are installed. The JSON API is under <code>/api</code>.</p>\n\
         <p>Drag this link to your bookmarks bar: <a href=\"{install}\">tagmap context</a></p>\n\
         </body></html>\n"
    ))
}
