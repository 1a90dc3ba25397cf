//! HTTP service for ontology upload, crowd validation and syntactic
//! reports.
//!
//! Admin routes (upload, delete, decision export, finalization, and reports
//! that name a server-side rule pack) require `Authorization: Bearer
//! <token>` when an admin token is configured.

mod error;
mod store;

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::extract::{DefaultBodyLimit, Multipart, Path as UrlPath, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{SecondsFormat, Utc};
use ontoqual_core::engine::{eval_pack, EngineContext, ViolationReport};
use ontoqual_core::expertise::{ExpertiseConfig, ProfileArchive};
use ontoqual_core::lexicon::HashEmbedder;
use ontoqual_core::regress::{parse_examples, Model, Verdict};
use ontoqual_core::rules::{
    default_pack, load_rule_pack, print_rule, Attribute, LinguisticFunction, OntologicalFunction, Operator, Priority,
    RelatedObject, RulePack,
};
use ontoqual_core::onto::{ElementKind, ValidationItem};
use ontoqual_core::validation::{finalize, latest_matrix, DecisionLogEntry, FinalizationResult, ValidationError};
use serde::{Deserialize, Serialize};

pub use error::{ApiError, StoreError};
pub use store::{EnrichmentSource, OntologyMeta, Store, Upload};

#[derive(Debug, Clone, Default)]
pub struct ServiceConfig {
    pub data_dir: PathBuf,
    pub admin_token: Option<String>,
    /// Pack used by syntactic reports that name none; the bundled pack
    /// otherwise.
    pub default_rules: Option<PathBuf>,
}

struct Inner {
    store: Store,
    admin_token: Option<String>,
    default_pack: RulePack,
    engine: EngineContext,
}

#[derive(Clone)]
pub struct AppState(Arc<Inner>);

impl AppState {
    pub fn open(config: ServiceConfig) -> Result<AppState, StartupError> {
        let default_pack = match &config.default_rules {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| StartupError::Rules(format!("{}: {e}", path.display())))?;
                load_rule_pack(&text).map_err(|e| StartupError::Rules(format!("{}: {e}", path.display())))?
            }
            None => default_pack(),
        };
        Ok(AppState(Arc::new(Inner {
            store: Store::open(&config.data_dir)?,
            admin_token: config.admin_token,
            default_pack,
            engine: EngineContext::default(),
        })))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum StartupError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("default rule pack: {0}")]
    Rules(String),
    #[error("cannot bind {addr}: {source}")]
    Bind {
        addr: SocketAddr,
        #[source]
        source: std::io::Error,
    },
    #[error("server error: {0}")]
    Serve(#[source] std::io::Error),
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/ontologies", get(list_ontologies).post(upload))
        .route("/ontologies/{id}", get(get_ontology).delete(delete_ontology))
        .route("/ontologies/{id}/elements", get(elements))
        .route("/ontologies/{id}/decisions", get(export_decisions).post(post_decision))
        .route("/ontologies/{id}/finalize", post(run_finalize))
        .route("/ontologies/{id}/finalization", get(get_finalization))
        .route("/ontologies/{id}/syntactic-report", post(syntactic_report))
        .route("/rules/vocabulary", get(vocabulary))
        .route("/rules/default", get(default_rules))
        .route("/rules/validate", post(validate_rules))
        .layer(DefaultBodyLimit::max(64 * 1024 * 1024))
        .with_state(state)
}

/// Serves until the process is stopped.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> Result<(), StartupError> {
    let state = AppState::open(config)?;
    let listener = tokio::net::TcpListener::bind(addr).await.map_err(|source| StartupError::Bind { addr, source })?;
    tracing::info!("listening on {addr}");
    axum::serve(listener, router(state)).await.map_err(StartupError::Serve)
}

fn require_admin(state: &Inner, headers: &HeaderMap) -> Result<(), ApiError> {
    let Some(token) = &state.admin_token else {
        return Ok(());
    };
    let given = headers
        .get(header::AUTHORIZATION)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.strip_prefix("Bearer "));
    if given == Some(token.as_str()) {
        Ok(())
    } else {
        Err(ApiError::new(StatusCode::UNAUTHORIZED, "admin token required"))
    }
}

fn ontology(state: &Inner, id: &str) -> Result<Arc<store::Ontology>, ApiError> {
    state.store.get(id).ok_or_else(|| ApiError::not_found(format!("unknown ontology `{id}`")))
}

fn json_text(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

async fn list_ontologies(State(s): State<AppState>) -> Json<Vec<OntologyMeta>> {
    Json(s.0.store.list())
}

async fn get_ontology(State(s): State<AppState>, UrlPath(id): UrlPath<String>) -> Result<Json<OntologyMeta>, ApiError> {
    Ok(Json(ontology(&s.0, &id)?.meta.clone()))
}

async fn upload(State(s): State<AppState>, headers: HeaderMap, mut form: Multipart) -> Result<Response, ApiError> {
    require_admin(&s.0, &headers)?;
    let mut fields: BTreeMap<String, String> = BTreeMap::new();
    while let Some(field) = form.next_field().await.map_err(|e| ApiError::bad_request(e.to_string()))? {
        let name = field.name().unwrap_or_default().to_owned();
        let text = field.text().await.map_err(|e| ApiError::bad_request(format!("{name}: {e}")))?;
        fields.insert(name, text);
    }
    let mut take = |names: &[&str]| names.iter().find_map(|n| fields.remove(*n));
    let enriched = take(&["enriched", "enriched.ttl"]).ok_or_else(|| ApiError::bad_request("missing field `enriched`"))?;
    let base = take(&["base", "base.ttl"]);
    let manifest = take(&["manifest", "manifest.json"]);
    let name = take(&["name"]).filter(|n| !n.trim().is_empty()).unwrap_or_else(|| "ontology".to_owned());
    let upload = Upload { name, enriched, base, manifest };
    let state = s.clone();
    let meta = tokio::task::spawn_blocking(move || state.0.store.create(upload))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    tracing::info!("stored ontology {} ({} enriched items)", meta.id, meta.enriched_items);
    Ok((StatusCode::CREATED, Json(serde_json::json!({ "id": meta.id, "enriched_items": meta.enriched_items })))
        .into_response())
}

async fn delete_ontology(
    State(s): State<AppState>,
    headers: HeaderMap,
    UrlPath(id): UrlPath<String>,
) -> Result<StatusCode, ApiError> {
    require_admin(&s.0, &headers)?;
    if s.0.store.delete(&id)? {
        Ok(StatusCode::NO_CONTENT)
    } else {
        Err(ApiError::not_found(format!("unknown ontology `{id}`")))
    }
}

#[derive(Debug, Deserialize)]
struct ElementsQuery {
    enriched: Option<bool>,
}

async fn elements(
    State(s): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<ElementsQuery>,
) -> Result<Json<Vec<ValidationItem>>, ApiError> {
    let o = ontology(&s.0, &id)?;
    Ok(Json(o.view.validation_items(q.enriched.unwrap_or(true))))
}

#[derive(Debug, Deserialize)]
struct DecisionRequest {
    validator_handle: String,
    item_key: String,
    decision: String,
}

async fn post_decision(
    State(s): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Json(req): Json<DecisionRequest>,
) -> Result<StatusCode, ApiError> {
    let o = ontology(&s.0, &id)?;
    let decision = match req.decision.to_ascii_lowercase().as_str() {
        "accept" => Verdict::Accept,
        "reject" => Verdict::Reject,
        other => return Err(ApiError::bad_request(format!("decision must be `accept` or `reject`, not `{other}`"))),
    };
    let handle = req.validator_handle.trim().trim_start_matches('@');
    if handle.is_empty() {
        return Err(ApiError::bad_request("validator_handle is empty"));
    }
    let kind = *o
        .items
        .get(&req.item_key)
        .ok_or_else(|| ApiError::not_found(format!("`{}` is not an enriched item of `{id}`", req.item_key)))?;
    let entry = DecisionLogEntry {
        timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
        ontology_id: id,
        validator_handle: handle.to_owned(),
        item_key: req.item_key,
        item_kind: kind,
        decision,
    };
    tokio::task::spawn_blocking(move || o.append(entry))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    Ok(StatusCode::NO_CONTENT)
}

async fn export_decisions(
    State(s): State<AppState>,
    headers: HeaderMap,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<Vec<DecisionLogEntry>>, ApiError> {
    require_admin(&s.0, &headers)?;
    Ok(Json(ontology(&s.0, &id)?.snapshot()))
}

#[derive(Debug, Deserialize)]
pub struct FinalizeRequest {
    pub archive_path: PathBuf,
    pub config: ExpertiseConfig,
    /// `linear`, `knn`, `svr`, `forest`, `identity` or `majority`.
    #[serde(default = "default_regressor")]
    pub regressor_spec: String,
    pub training_examples_path: Option<PathBuf>,
    /// A trained model to use instead of `regressor_spec`.
    pub model_path: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

fn default_regressor() -> String {
    "svr".to_owned()
}

fn read_file(path: &Path, what: &str) -> Result<String, ApiError> {
    std::fs::read_to_string(path).map_err(|e| ApiError::bad_request(format!("{what} {}: {e}", path.display())))
}

fn prepare_model(req: &FinalizeRequest) -> Result<Model, ApiError> {
    if let Some(path) = &req.model_path {
        let model = Model::from_json(&read_file(path, "model")?).map_err(|e| ApiError::bad_request(e.to_string()))?;
        if !model.is_trained() {
            return Err(ApiError::bad_request(format!("model {} is not trained", path.display())));
        }
        return Ok(model);
    }
    let examples = match &req.training_examples_path {
        Some(path) => {
            Some(parse_examples(&read_file(path, "training examples")?).map_err(|e| ApiError::bad_request(e.to_string()))?)
        }
        None => None,
    };
    Model::trained(&req.regressor_spec, req.seed, examples.as_deref()).map_err(|e| {
        ApiError::bad_request(format!("regressor `{}`: {e}; provide training_examples_path or model_path", req.regressor_spec))
    })
}

async fn run_finalize(
    State(s): State<AppState>,
    headers: HeaderMap,
    UrlPath(id): UrlPath<String>,
    Json(req): Json<FinalizeRequest>,
) -> Result<Json<FinalizationResult>, ApiError> {
    require_admin(&s.0, &headers)?;
    let o = ontology(&s.0, &id)?;
    let log = o.snapshot();
    if log.is_empty() {
        return Err(ApiError::new(StatusCode::CONFLICT, "no decisions have been logged"));
    }
    let state = s.clone();
    let result = tokio::task::spawn_blocking(move || -> Result<FinalizationResult, ApiError> {
        let archive = ProfileArchive::from_json(&read_file(&req.archive_path, "archive")?)
            .map_err(|e| ApiError::bad_request(e.to_string()))?;
        let model = prepare_model(&req)?;
        let items: Vec<String> = o.items.keys().cloned().collect();
        let matrix = latest_matrix(&log, Some(&items));
        let result = finalize(&matrix, &archive, &req.config, &HashEmbedder::default(), &model).map_err(|e| match e {
            ValidationError::NoDecisions => ApiError::new(StatusCode::CONFLICT, e.to_string()),
            other => ApiError::bad_request(other.to_string()),
        })?;
        for w in &result.warnings {
            tracing::warn!("finalize {}: {w}", o.meta.id);
        }
        state.0.store.save_finalization(&o.meta.id, &result)?;
        Ok(result)
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    Ok(Json(result))
}

async fn get_finalization(
    State(s): State<AppState>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<FinalizationResult>, ApiError> {
    ontology(&s.0, &id)?;
    s.0.store.finalization(&id)?.map(Json).ok_or_else(|| ApiError::not_found("ontology has not been finalized"))
}

#[derive(Debug, Default, Deserialize)]
struct ReportRequest {
    rule_pack_path: Option<PathBuf>,
}

async fn syntactic_report(
    State(s): State<AppState>,
    headers: HeaderMap,
    UrlPath(id): UrlPath<String>,
    body: Option<Json<ReportRequest>>,
) -> Result<Response, ApiError> {
    let req = body.map(|Json(r)| r).unwrap_or_default();
    let o = ontology(&s.0, &id)?;
    let pack = match &req.rule_pack_path {
        Some(path) => {
            require_admin(&s.0, &headers)?;
            load_rule_pack(&read_file(path, "rule pack")?).map_err(|e| ApiError::bad_request(e.to_string()))?
        }
        None => s.0.default_pack.clone(),
    };
    let state = s.clone();
    let report: ViolationReport =
        tokio::task::spawn_blocking(move || eval_pack(&o.meta.name, &pack, &o.view, &state.0.engine))
            .await
            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    Ok(json_text(StatusCode::OK, report.to_json() + "\n"))
}

#[derive(Debug, Serialize)]
struct Vocabulary {
    subjects: Vec<&'static str>,
    priorities: Vec<&'static str>,
    clauses: BTreeMap<&'static str, Vec<&'static str>>,
    operators: BTreeMap<&'static str, Vec<&'static str>>,
}

async fn vocabulary() -> Json<Vocabulary> {
    let clauses = BTreeMap::from([
        ("hasRelatedElement", RelatedObject::ALL.iter().map(|o| o.keyword()).collect()),
        ("hasAttribute", Attribute::ALL.iter().map(|a| a.keyword()).collect()),
        ("hasOntologicalProperty", OntologicalFunction::ALL.iter().map(|f| f.keyword()).collect()),
        ("hasLinguisticProperty", LinguisticFunction::ALL.iter().map(|f| f.keyword()).collect()),
    ]);
    let (logical, comparative): (Vec<Operator>, Vec<Operator>) = Operator::ALL.iter().partition(|o| o.is_logical());
    let operators = BTreeMap::from([
        ("usesLogicalOperator", logical.iter().map(|o| o.keyword()).collect()),
        ("usesComparativeOperator", comparative.iter().map(|o| o.keyword()).collect()),
    ]);
    Json(Vocabulary {
        subjects: ElementKind::ALL.iter().map(|k| k.keyword()).collect(),
        priorities: Priority::ALL.iter().map(|p| p.as_str()).collect(),
        clauses,
        operators,
    })
}

async fn default_rules() -> Response {
    (StatusCode::OK, [(header::CONTENT_TYPE, "text/plain; charset=utf-8")], ontoqual_core::rules::default_pack_source())
        .into_response()
}

#[derive(Debug, Deserialize)]
struct ValidateRequest {
    source: String,
}

#[derive(Debug, Serialize)]
struct ValidatedRule {
    id: String,
    priority: Priority,
    text: String,
}

/// Parses a rule pack, or a single bare rule, and echoes the canonical text.
async fn validate_rules(Json(req): Json<ValidateRequest>) -> Result<Json<serde_json::Value>, ApiError> {
    let trimmed = req.source.trim();
    let pack = if trimmed.lines().any(|l| l.trim_start().starts_with("rule ") || l.trim_start().starts_with("pack ")) {
        load_rule_pack(&req.source).map_err(|e| ApiError::bad_request(e.to_string()))?
    } else {
        let rule = ontoqual_core::rules::parse_rule(trimmed).map_err(|e| ApiError::bad_request(e.to_string()))?;
        RulePack { name: String::new(), rules: vec![rule] }
    };
    let rules: Vec<ValidatedRule> = pack
        .rules
        .iter()
        .map(|r| ValidatedRule { id: r.id.clone(), priority: r.priority, text: print_rule(r) })
        .collect();
    Ok(Json(serde_json::json!({ "name": pack.name, "rules": rules })))
}
