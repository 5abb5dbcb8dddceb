//! HTTP what-if service.

use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use wasa_core::{catalog, EvalError, Polarity};

use crate::document::{from_json, DocumentError, EdgeDoc, GraphDocument};
use crate::eval::{error_kind, evaluate_graph, EvalRequest, EvalResponse};
use crate::fixtures;
use crate::store::Store;

pub struct AppState {
    /// One lock for the whole store: writes are serialized, reads share it.
    store: RwLock<Store>,
}

impl AppState {
    pub fn new(store: Store) -> Arc<AppState> {
        Arc::new(AppState {
            store: RwLock::new(store),
        })
    }
}

#[derive(Debug, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    status: StatusCode,
    code: &'static str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<Value>,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> ApiError {
        ApiError {
            status,
            code,
            message: message.into(),
            path: None,
            detail: None,
        }
    }

    fn not_found(what: &str) -> ApiError {
        ApiError::new(
            StatusCode::NOT_FOUND,
            "NotFound",
            format!("no graph `{what}`"),
        )
    }

    fn validation(path: impl Into<String>, message: impl Into<String>) -> ApiError {
        ApiError {
            path: Some(path.into()),
            ..ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "ValidationError", message)
        }
    }

    fn storage(e: std::io::Error) -> ApiError {
        ApiError::new(
            StatusCode::INTERNAL_SERVER_ERROR,
            "StorageError",
            e.to_string(),
        )
    }

    fn non_convergence(resp: &EvalResponse) -> ApiError {
        ApiError {
            detail: Some(serde_json::to_value(resp).expect("responses serialize")),
            ..ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "EvaluationError",
                format!("evaluation is {}", resp.status),
            )
        }
    }
}

impl From<DocumentError> for ApiError {
    fn from(e: DocumentError) -> ApiError {
        match &e {
            DocumentError::Malformed { line, column, .. } => ApiError {
                detail: Some(json!({ "line": line, "column": column })),
                ..ApiError::new(StatusCode::BAD_REQUEST, "ValidationError", e.to_string())
            },
            DocumentError::Schema { path, message } => {
                ApiError::validation(path.clone(), message.clone())
            }
        }
    }
}

impl From<EvalError> for ApiError {
    fn from(e: EvalError) -> ApiError {
        ApiError {
            detail: Some(json!({ "kind": error_kind(&e) })),
            ..ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "EvaluationError",
                e.to_string(),
            )
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/graphs", post(create_graph))
        .route("/graphs/{id}", get(get_graph).put(put_graph))
        .route("/graphs/{id}/evaluate", post(evaluate_stored))
        .route("/graphs/{id}/weights", patch(patch_weights))
        .route("/graphs/{id}/edges", patch(patch_edges))
        .route("/evaluate", post(evaluate_inline))
        .route("/semantics", get(list_semantics))
        .route("/fixtures", get(list_fixtures))
        .route("/fixtures/{name}", get(get_fixture))
        .with_state(state)
}

fn load(state: &AppState, id: &str) -> ApiResult<GraphDocument> {
    let store = state.store.read().expect("store lock poisoned");
    store
        .get(id)
        .cloned()
        .ok_or_else(|| ApiError::not_found(id))
}

fn parse_doc(body: &[u8]) -> ApiResult<GraphDocument> {
    let doc: GraphDocument = from_json(body)?;
    doc.validate()?;
    Ok(doc)
}

/// Document-level errors found inside a larger request body.
fn nested(prefix: &str, e: DocumentError) -> ApiError {
    match e {
        DocumentError::Schema { path, message } => {
            let path = if path.is_empty() || path == "$" {
                prefix.to_string()
            } else {
                format!("{prefix}.{path}")
            };
            ApiError::validation(path, message)
        }
        other => other.into(),
    }
}

async fn run_eval(doc: GraphDocument, req: EvalRequest) -> ApiResult<EvalResponse> {
    let g = doc.to_graph()?;
    tokio::task::spawn_blocking(move || evaluate_graph(&g, &req))
        .await
        .map_err(|e| {
            ApiError::new(
                StatusCode::INTERNAL_SERVER_ERROR,
                "InternalError",
                e.to_string(),
            )
        })?
        .map_err(ApiError::from)
}

async fn converged(doc: GraphDocument, req: EvalRequest) -> ApiResult<EvalResponse> {
    let resp = run_eval(doc, req).await?;
    if resp.is_converged() {
        Ok(resp)
    } else {
        Err(ApiError::non_convergence(&resp))
    }
}

#[derive(Serialize)]
struct Stored {
    id: String,
    document: GraphDocument,
}

async fn create_graph(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<Response> {
    let doc = parse_doc(&body)?;
    let id = doc.content_id();
    let created = {
        let mut store = state.store.write().expect("store lock poisoned");
        if store.get(&id) == Some(&doc) {
            false
        } else {
            store.put(&id, doc.clone()).map_err(ApiError::storage)?
        }
    };
    let status = if created {
        StatusCode::CREATED
    } else {
        StatusCode::OK
    };
    Ok((status, Json(Stored { id, document: doc })).into_response())
}

async fn get_graph(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Json<GraphDocument>> {
    load(&state, &id).map(Json)
}

async fn put_graph(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Response> {
    let doc = parse_doc(&body)?;
    let created = state
        .store
        .write()
        .expect("store lock poisoned")
        .put(&id, doc.clone())
        .map_err(ApiError::storage)?;
    let status = if created {
        StatusCode::CREATED
    } else {
        StatusCode::OK
    };
    Ok((status, Json(Stored { id, document: doc })).into_response())
}

fn parse_request(body: &[u8]) -> ApiResult<EvalRequest> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(EvalRequest::default());
    }
    Ok(from_json(body)?)
}

async fn evaluate_stored(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<EvalResponse>> {
    let req = parse_request(&body)?;
    let doc = load(&state, &id)?;
    converged(doc, req).await.map(Json)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InlineEval {
    /// A stored graph id or an inline document.
    graph: Value,
    #[serde(default)]
    request: Option<EvalRequest>,
}

async fn evaluate_inline(
    State(state): State<Arc<AppState>>,
    body: Bytes,
) -> ApiResult<Json<EvalResponse>> {
    let inline: InlineEval = from_json(&body)?;
    let doc = match inline.graph {
        Value::String(id) => load(&state, &id)?,
        v => {
            let doc: GraphDocument = serde_path_to_error::deserialize(v).map_err(|e| {
                ApiError::validation(
                    match e.path().to_string() {
                        p if p == "." => "graph".to_string(),
                        p => format!("graph.{p}"),
                    },
                    e.into_inner().to_string(),
                )
            })?;
            doc.validate().map_err(|e| nested("graph", e))?;
            doc
        }
    };
    converged(doc, inline.request.unwrap_or_default())
        .await
        .map(Json)
}

#[derive(Serialize)]
struct Patched {
    document: GraphDocument,
    evaluation: EvalResponse,
}

/// Applies `edit` to the stored document, evaluates the result and stores
/// it unless a concurrent write got there first, in which case the edit is
/// replayed on the newer document. Documents whose evaluation fails with a
/// domain error are not stored.
async fn patch_with(
    state: Arc<AppState>,
    id: String,
    req: EvalRequest,
    edit: impl Fn(&mut GraphDocument) -> ApiResult<()>,
) -> ApiResult<Json<Patched>> {
    loop {
        let base = load(&state, &id)?;
        let mut doc = base.clone();
        edit(&mut doc)?;
        doc.validate()?;
        let evaluation = run_eval(doc.clone(), req.clone()).await?;
        let mut store = state.store.write().expect("store lock poisoned");
        if store.get(&id) != Some(&base) {
            continue;
        }
        store.put(&id, doc.clone()).map_err(ApiError::storage)?;
        return Ok(Json(Patched {
            document: doc,
            evaluation,
        }));
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightPatch {
    weights: BTreeMap<String, f64>,
    #[serde(default)]
    request: Option<EvalRequest>,
}

async fn patch_weights(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<Patched>> {
    let p: WeightPatch = from_json(&body)?;
    let req = p.request.unwrap_or_default();
    patch_with(state, id, req, move |doc| {
        for (arg, &w) in &p.weights {
            let k = doc.argument_index(arg).ok_or_else(|| {
                ApiError::validation(
                    format!("weights.{arg}"),
                    format!("unknown argument `{arg}`"),
                )
            })?;
            doc.arguments[k].weight = w;
        }
        Ok(())
    })
    .await
}

#[derive(Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum EdgeOp {
    Add,
    Remove,
    Flip,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgePatch {
    op: EdgeOp,
    from: String,
    to: String,
    #[serde(default)]
    polarity: Option<Polarity>,
    #[serde(default)]
    request: Option<EvalRequest>,
}

async fn patch_edges(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<Patched>> {
    let p: EdgePatch = from_json(&body)?;
    let req = p.request.clone().unwrap_or_default();
    patch_with(state, id, req, move |doc| {
        for (field, arg) in [("from", &p.from), ("to", &p.to)] {
            if doc.argument_index(arg).is_none() {
                return Err(ApiError::validation(
                    field,
                    format!("unknown argument `{arg}`"),
                ));
            }
        }
        let existing = doc.edge_index(&p.from, &p.to);
        let missing =
            || ApiError::validation("from", format!("no edge from `{}` to `{}`", p.from, p.to));
        match p.op {
            EdgeOp::Add => {
                let polarity = p.polarity.ok_or_else(|| {
                    ApiError::validation("polarity", "adding an edge needs a polarity")
                })?;
                if existing.is_some() {
                    return Err(ApiError::validation(
                        "from",
                        format!("an edge from `{}` to `{}` already exists", p.from, p.to),
                    ));
                }
                doc.edges.push(EdgeDoc {
                    from: p.from.clone(),
                    to: p.to.clone(),
                    polarity,
                });
            }
            EdgeOp::Remove => {
                doc.edges.remove(existing.ok_or_else(missing)?);
            }
            EdgeOp::Flip => {
                let k = existing.ok_or_else(missing)?;
                doc.edges[k].polarity = doc.edges[k].polarity.flipped();
            }
        }
        Ok(())
    })
    .await
}

async fn list_semantics() -> Json<Value> {
    let entries: Vec<Value> = catalog()
        .into_iter()
        .map(|s| {
            json!({
                "tag": s.tag,
                "name": s.name,
                "weight_range": s.weight_range.notation(),
                "neutral_value": s.neutral_value,
                "convergent": s.convergent,
                "bounded": s.bounded,
                "reverse_impact": s.reverse_impact,
            })
        })
        .collect();
    Json(Value::Array(entries))
}

async fn list_fixtures() -> Json<Vec<&'static str>> {
    Json(fixtures::names().collect())
}

async fn get_fixture(Path(name): Path<String>) -> ApiResult<Json<GraphDocument>> {
    fixtures::fixture(&name).map(Json).ok_or_else(|| {
        ApiError::new(
            StatusCode::NOT_FOUND,
            "NotFound",
            format!("no fixture `{name}`"),
        )
    })
}

pub async fn serve(store: Store, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(AppState::new(store))).await
}
