//! Read-only HTTP API over an immutable workspace snapshot.

use std::path::Path;
use std::sync::Arc;

use anyhow::{Context, Result};
use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use ccvi_core::admin::{build_adjacency, export_choropleth};
use ccvi_core::index::{hotspot_gi_star, results_json, IndexError};
use ccvi_core::model::validate_weights;
use ccvi_core::{
    AdminHierarchy, AdminLevel, AdminUnit, Contiguity, IndicatorCatalog, IndicatorMatrix, ModelError, WeightConfig,
};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::fire::{read_class_areas, ClassArea, AREAS_FILE};
use crate::workspace::{assess, LevelResults, Workspace, FIRE_RISK, LEVELS};

#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self { status, message: message.into() }
    }

    fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, message)
    }

    fn unprocessable(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, message)
    }
}

impl From<ModelError> for ApiError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::WeightSyntax(_) => Self::new(StatusCode::BAD_REQUEST, e.to_string()),
            _ => Self::unprocessable(e.to_string()),
        }
    }
}

impl From<IndexError> for ApiError {
    fn from(e: IndexError) -> Self {
        match e {
            IndexError::Weights(m) => m.into(),
            e => Self::unprocessable(e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

type ApiResult = std::result::Result<Json<Value>, ApiError>;

/// Everything the endpoints read, computed once at startup.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub catalog: IndicatorCatalog,
    pub admin: AdminHierarchy,
    pub weights: WeightConfig,
    /// Raw indicator values for every unit.
    pub raw: IndicatorMatrix,
    /// Normalized village matrix; weight-independent, reused by what-if.
    pub normalized: IndicatorMatrix,
    pub results: LevelResults,
    pub fire_risk: Option<Vec<ClassArea>>,
}

impl Snapshot {
    /// Loads a computed workspace using the weights of its latest compute.
    pub fn load(root: &Path) -> Result<Self> {
        let ws = Workspace::open(root)?;
        let weights = ws.current_weights()?;
        let normalized = ws.normalized_villages()?;
        let results = assess(&normalized, &ws.catalog, &ws.admin, &weights)?;
        let areas = root.join(FIRE_RISK).join(AREAS_FILE);
        let fire_risk = areas.is_file().then(|| read_class_areas(&areas)).transpose().context("fire-risk summary")?;
        Ok(Self { catalog: ws.catalog, admin: ws.admin, weights, raw: ws.matrix, normalized, results, fire_risk })
    }

    /// Results for an ad-hoc weight document, from the cached normalized
    /// matrix. Nothing is stored.
    pub fn whatif(&self, body: &[u8]) -> std::result::Result<Value, ApiError> {
        let text = std::str::from_utf8(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?;
        let config = WeightConfig::from_json(text, &self.catalog)?;
        let config = validate_weights(config, &self.catalog)?;
        let results = assess(&self.normalized, &self.catalog, &self.admin, &config)?;
        let mut by_level = Map::new();
        let mut rankings = Map::new();
        for level in LEVELS {
            let a = results.get(level);
            by_level.insert(level.to_string(), results_json(a));
            let order: Vec<Value> = a
                .ranking()
                .into_iter()
                .map(|u| json!({ "unit_id": u.unit_id, "rank": u.rank, "class": u.class, "vi": u.vi() }))
                .collect();
            rankings.insert(level.to_string(), Value::Array(order));
        }
        Ok(json!({ "weight_config_id": config.id, "results": by_level, "rankings": rankings }))
    }
}

fn parse_level(s: &str) -> std::result::Result<AdminLevel, ApiError> {
    s.parse().map_err(|_| ApiError::not_found(format!("unknown level `{s}`")))
}

fn unit_json(u: &AdminUnit) -> Value {
    json!({
        "unit_id": u.unit_id,
        "name": u.name,
        "level": u.level,
        "parent_id": u.parent_id,
        "household_count": u.household_count,
    })
}

#[derive(Debug, Default, Deserialize)]
struct LevelQuery {
    level: Option<String>,
    contiguity: Option<String>,
}

impl LevelQuery {
    fn level_or_village(&self) -> std::result::Result<AdminLevel, ApiError> {
        self.level.as_deref().map_or(Ok(AdminLevel::Village), parse_level)
    }
}

type Shared = State<Arc<Snapshot>>;

async fn catalog(State(s): Shared) -> ApiResult {
    let indicators: Value = serde_json::from_str(&s.catalog.to_json()).expect("catalog JSON");
    let weights = serde_json::to_value(s.weights.to_document()).expect("weights JSON");
    Ok(Json(json!({ "indicators": indicators, "weights": weights, "weight_config_id": s.weights.id })))
}

async fn units(State(s): Shared, Query(q): Query<LevelQuery>) -> ApiResult {
    let level = q.level.as_deref().map(parse_level).transpose()?;
    let units: Vec<Value> =
        s.admin.units().iter().filter(|u| level.is_none_or(|l| u.level == l)).map(unit_json).collect();
    Ok(Json(Value::Array(units)))
}

async fn results(State(s): Shared, Query(q): Query<LevelQuery>) -> ApiResult {
    Ok(Json(results_json(s.results.get(q.level_or_village()?))))
}

async fn choropleth(State(s): Shared, UrlPath(level): UrlPath<String>) -> ApiResult {
    let level = parse_level(&level)?;
    let doc = export_choropleth(&s.admin, s.results.get(level), level)
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    Ok(Json(serde_json::from_str(&doc).expect("choropleth JSON")))
}

async fn fire_risk_summary(State(s): Shared) -> ApiResult {
    let rows = s.fire_risk.as_ref().ok_or_else(|| ApiError::not_found("workspace has no fire-risk outputs"))?;
    let total: f64 = rows.iter().map(|r| r.area_km2).sum();
    Ok(Json(json!({ "classes": rows, "total_area_km2": total })))
}

async fn unit_detail(State(s): Shared, UrlPath(id): UrlPath<String>) -> ApiResult {
    let unit = s.admin.get(&id).ok_or_else(|| ApiError::not_found(format!("unknown unit `{id}`")))?;
    let raw: Map<String, Value> = match s.raw.unit_position(&id) {
        Some(row) => s
            .raw
            .codes()
            .iter()
            .zip(s.raw.row(row))
            .map(|(c, v)| (c.clone(), v.map_or(Value::Null, Value::from)))
            .collect(),
        None => Map::new(),
    };
    let mut lineage = Vec::new();
    let mut cur = Some(unit);
    while let Some(u) = cur {
        let a = s.results.get(u.level);
        let entry = a.unit(&u.unit_id);
        let values: Map<String, Value> = a
            .columns
            .iter()
            .enumerate()
            .map(|(j, c)| (c.name(), entry.and_then(|e| e.values[j]).map_or(Value::Null, Value::from)))
            .collect();
        lineage.push(json!({
            "unit_id": u.unit_id,
            "name": u.name,
            "level": u.level,
            "class": entry.and_then(|e| e.class),
            "rank": entry.and_then(|e| e.rank),
            "values": values,
        }));
        cur = u.parent_id.as_deref().and_then(|p| s.admin.get(p));
    }
    let children: Vec<&str> = s.admin.children(&id).map(|c| c.unit_id.as_str()).collect();
    Ok(Json(json!({
        "unit": unit_json(unit),
        "children": children,
        "raw_indicators": raw,
        "lineage": lineage,
        "weight_config_id": s.weights.id,
    })))
}

async fn whatif(State(s): Shared, body: Bytes) -> ApiResult {
    // recomputation is CPU-bound; keep it off the async workers
    let out = tokio::task::spawn_blocking(move || s.whatif(&body))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    Ok(Json(out))
}

async fn hotspots(State(s): Shared, Query(q): Query<LevelQuery>) -> ApiResult {
    let level = q.level_or_village()?;
    let contiguity = match q.contiguity.as_deref() {
        None => Contiguity::Queen,
        Some(c) => c.parse().map_err(|c| ApiError::unprocessable(format!("unknown contiguity `{c}`")))?,
    };
    let a = s.results.get(level);
    let values: std::collections::BTreeMap<String, f64> =
        a.units.iter().filter_map(|u| Some((u.unit_id.clone(), u.vi()?))).collect();
    let mut adjacency = build_adjacency(&s.admin, level, contiguity);
    adjacency.retain(|id, _| values.contains_key(id));
    for ns in adjacency.values_mut() {
        ns.retain(|n| values.contains_key(n));
    }
    let z = hotspot_gi_star(&values, &adjacency)?;
    let units: Vec<Value> = values
        .iter()
        .map(|(id, vi)| json!({ "unit_id": id, "vi": vi, "z": z[id], "neighbors": adjacency.get(id) }))
        .collect();
    Ok(Json(json!({ "level": level, "contiguity": contiguity.to_string(), "column": "vi", "units": units })))
}

pub fn router(snapshot: Arc<Snapshot>) -> Router {
    Router::new()
        .route("/api/catalog", get(catalog))
        .route("/api/units", get(units))
        .route("/api/results", get(results))
        .route("/api/choropleth/{level}", get(choropleth))
        .route("/api/fire-risk/summary", get(fire_risk_summary))
        .route("/api/unit/{id}", get(unit_detail))
        .route("/api/whatif", post(whatif))
        .route("/api/hotspots", get(hotspots))
        .with_state(snapshot)
}

pub async fn serve(root: &Path, port: u16) -> Result<()> {
    let snapshot = Arc::new(Snapshot::load(root)?);
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port))
        .await
        .with_context(|| format!("binding port {port}"))?;
    log::info!("serving {} on http://{}", root.display(), listener.local_addr()?);
    axum::serve(listener, router(snapshot))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
