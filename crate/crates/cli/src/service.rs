//! Read-only HTTP configuration service over one feature model.
//!
//! Malformed request bodies get 400; well-formed requests naming unknown
//! features (or otherwise unusable decisions) get 422.

use std::path::Path;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;
use splforge_core::derive::{derive_product, write_manifest, DeriveError, ProductManifest};
use splforge_core::fm::{
    count_extensions, propagate, AnalysisError, ConfigError, Configuration, FeatureModel, GroupKind, Variability,
    Violation,
};
use tower_http::cors::CorsLayer;
use tower_http::services::ServeDir;

use crate::commands::validation_report;

type Shared = Arc<FeatureModel>;

/// Error response: status plus `{"error": ..., "violations": [...]?}`.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
    violations: Vec<ViolationView>,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        Self { status: StatusCode::BAD_REQUEST, message: message.into(), violations: Vec::new() }
    }

    fn unprocessable(message: impl Into<String>) -> Self {
        Self { status: StatusCode::UNPROCESSABLE_ENTITY, message: message.into(), violations: Vec::new() }
    }
}

impl From<ConfigError> for ApiError {
    fn from(e: ConfigError) -> Self {
        Self::unprocessable(e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.message });
        if !self.violations.is_empty() {
            body["violations"] = json!(self.violations);
        }
        (self.status, Json(body)).into_response()
    }
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed request body: {e}")))
}

/// Feature decisions as sent by clients.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DecisionsBody {
    #[serde(default)]
    pub selected: Vec<String>,
    #[serde(default)]
    pub deselected: Vec<String>,
}

impl DecisionsBody {
    fn to_config(&self, model: &FeatureModel) -> Result<Configuration, ApiError> {
        let c = Configuration::new(self.selected.iter().cloned(), self.deselected.iter().cloned());
        c.resolve(model)?;
        Ok(c.with_total_for(model))
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeriveBody {
    #[serde(default)]
    pub selected: Vec<String>,
    #[serde(default)]
    pub deselected: Vec<String>,
    pub name: Option<String>,
    pub version: Option<u32>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
struct FeatureView {
    name: String,
    parent: Option<String>,
    variability: &'static str,
    group: Option<String>,
    version: u32,
    module: Option<String>,
    layers: Vec<&'static str>,
    children: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
struct GroupView {
    name: String,
    parent: String,
    kind: &'static str,
    members: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
struct ConstraintView {
    kind: &'static str,
    from: String,
    to: String,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
struct ModelView {
    name: String,
    root: String,
    max_version: u32,
    /// Preorder: parents before children.
    features: Vec<FeatureView>,
    groups: Vec<GroupView>,
    constraints: Vec<ConstraintView>,
}

fn model_view(m: &FeatureModel) -> ModelView {
    let features = m
        .features()
        .iter()
        .map(|f| FeatureView {
            name: f.name.clone(),
            parent: f.parent.map(|p| m.name_of(p).to_string()),
            variability: match f.variability {
                Variability::Mandatory => "mandatory",
                Variability::Optional => "optional",
                Variability::GroupMember => "group-member",
            },
            group: m.group_of(f.id).map(|g| g.name.clone()),
            version: f.version,
            module: f.asset.as_ref().map(|a| a.module_id.clone()),
            layers: f.asset.as_ref().map(|a| a.layers.iter().map(|l| l.as_str()).collect()).unwrap_or_default(),
            children: f.children.iter().map(|&c| m.name_of(c).to_string()).collect(),
        })
        .collect();
    let groups = m
        .groups()
        .iter()
        .map(|g| GroupView {
            name: g.name.clone(),
            parent: m.name_of(g.parent).to_string(),
            kind: match g.kind {
                GroupKind::Alternative => "alt",
                GroupKind::Or => "or",
            },
            members: g.members.iter().map(|&x| m.name_of(x).to_string()).collect(),
        })
        .collect();
    let constraints = m
        .constraints()
        .iter()
        .map(|c| ConstraintView { kind: c.kind.keyword(), from: m.name_of(c.from).into(), to: m.name_of(c.to).into() })
        .collect();
    ModelView {
        name: m.name().to_string(),
        root: m.name_of(m.root()).to_string(),
        max_version: m.max_version(),
        features,
        groups,
        constraints,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ViolationView {
    kind: &'static str,
    features: Vec<String>,
    message: &'static str,
}

fn violation_views(v: &[Violation]) -> Vec<ViolationView> {
    v.iter()
        .map(|v| ViolationView { kind: v.kind.as_str(), features: v.features.clone(), message: v.message() })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
struct ModuleView {
    module_id: String,
    layers: Vec<&'static str>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
struct ManifestView {
    product_name: String,
    model_name: String,
    version: u32,
    features: Vec<String>,
    modules: Vec<ModuleView>,
    languages: Vec<String>,
    cycle_count: usize,
    /// The manifest in its text form, as `splforge derive` writes it.
    text: String,
}

fn manifest_view(m: &ProductManifest) -> ManifestView {
    ManifestView {
        product_name: m.product_name.clone(),
        model_name: m.model_name.clone(),
        version: m.version,
        features: m.features.clone(),
        modules: m
            .modules
            .iter()
            .map(|e| ModuleView { module_id: e.module_id.clone(), layers: e.layers.iter().map(|l| l.as_str()).collect() })
            .collect(),
        languages: m.languages.clone(),
        cycle_count: m.cycle_count,
        text: write_manifest(m),
    }
}

async fn get_model(State(model): State<Shared>) -> Json<ModelView> {
    Json(model_view(&model))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CountQuery {
    selected: Option<String>,
    deselected: Option<String>,
}

fn split_names(s: &Option<String>) -> Vec<String> {
    s.as_deref()
        .map(|s| s.split(',').map(str::trim).filter(|n| !n.is_empty()).map(String::from).collect())
        .unwrap_or_default()
}

async fn get_count(State(model): State<Shared>, Query(q): Query<CountQuery>) -> Result<Json<serde_json::Value>, ApiError> {
    let body = DecisionsBody { selected: split_names(&q.selected), deselected: split_names(&q.deselected) };
    let config = body.to_config(&model)?;
    let n = count_extensions(&model, &config).map_err(|e| match e {
        AnalysisError::Config(c) => ApiError::from(c),
        other => ApiError::unprocessable(other.to_string()),
    })?;
    Ok(Json(json!({ "products": n })))
}

async fn post_validate(State(model): State<Shared>, body: Bytes) -> Result<Json<serde_json::Value>, ApiError> {
    let body: DecisionsBody = parse_body(&body)?;
    let config = body.to_config(&model)?;
    let r = validation_report(&model, &config)?;
    Ok(Json(json!({
        "valid": r.valid,
        "violations": violation_views(&r.violations),
        "undecided": r.undecided,
        "conflict": r.conflict,
    })))
}

async fn post_propagate(State(model): State<Shared>, body: Bytes) -> Result<Response, ApiError> {
    let body: DecisionsBody = parse_body(&body)?;
    let config = body.to_config(&model)?;
    let result = tokio::task::spawn_blocking(move || propagate(&model, &config))
        .await
        .map_err(|e| ApiError { status: StatusCode::INTERNAL_SERVER_ERROR, message: e.to_string(), violations: Vec::new() })??;
    Ok(Json(result).into_response())
}

async fn post_derive(State(model): State<Shared>, body: Bytes) -> Result<Json<ManifestView>, ApiError> {
    let body: DeriveBody = parse_body(&body)?;
    let decisions = DecisionsBody { selected: body.selected, deselected: body.deselected };
    let config = decisions.to_config(&model)?;
    let version = body.version.unwrap_or_else(|| model.max_version());
    let name = body.name.unwrap_or_else(|| "product".to_string());
    match derive_product(&model, &config, &name, version) {
        Ok(m) => Ok(Json(manifest_view(&m))),
        // The manifest is still meaningful; cycleCount reports the defect.
        Err(DeriveError::Cycle { manifest, .. }) => Ok(Json(manifest_view(&manifest))),
        Err(DeriveError::InvalidConfiguration(v)) => Err(ApiError {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            message: "invalid configuration".into(),
            violations: violation_views(&v),
        }),
        Err(e) => Err(ApiError::unprocessable(e.to_string())),
    }
}

/// The API routes with permissive CORS. With `static_dir`, other paths are
/// served from that directory.
pub fn router(model: FeatureModel, static_dir: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/api/model", get(get_model))
        .route("/api/count", get(get_count))
        .route("/api/validate", post(post_validate))
        .route("/api/propagate", post(post_propagate))
        .route("/api/derive", post(post_derive))
        .with_state(Arc::new(model));
    let app = match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    app.layer(CorsLayer::permissive())
}
