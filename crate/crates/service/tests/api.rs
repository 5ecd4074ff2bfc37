mod common;

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use ccvi_core::index::compute_assessment;
use ccvi_core::model::{default_weights, validate_weights};
use ccvi_service::api::{router, Snapshot};
use ccvi_service::workspace::Workspace;
use common::{computed_workspace, snapshot, BAD_WEIGHTS};
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

async fn call(app: &axum::Router, method: &str, uri: &str, body: &str) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri).body(Body::from(body.to_string())).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap())
}

async fn get(app: &axum::Router, uri: &str) -> (StatusCode, Value) {
    call(app, "GET", uri, "").await
}

fn app() -> (tempfile::TempDir, std::path::PathBuf, axum::Router) {
    let (tmp, ws) = computed_workspace();
    let app = router(Arc::new(Snapshot::load(&ws).unwrap()));
    (tmp, ws, app)
}

#[tokio::test]
async fn units_and_levels() {
    let (_tmp, _ws, app) = app();
    let (status, body) = get(&app, "/api/units?level=village").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body.as_array().unwrap().len(), 8);
    assert_eq!(get(&app, "/api/units").await.1.as_array().unwrap().len(), 14);
    assert_eq!(get(&app, "/api/units?level=county").await.0, StatusCode::NOT_FOUND);
    assert_eq!(get(&app, "/api/results?level=county").await.0, StatusCode::NOT_FOUND);
    assert_eq!(get(&app, "/api/choropleth/county").await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn results_and_choropleth_agree() {
    let (_tmp, _ws, app) = app();
    let (_, results) = get(&app, "/api/results?level=municipality").await;
    let (status, geo) = get(&app, "/api/choropleth/municipality").await;
    assert_eq!(status, StatusCode::OK);
    let features = geo["features"].as_array().unwrap();
    assert_eq!(features.len(), 4);
    for f in features {
        let id = &f["properties"]["unit_id"];
        let row = results.as_array().unwrap().iter().find(|r| &r["unit_id"] == id).unwrap();
        assert_eq!(f["properties"]["vi"], row["vi"]);
        assert_eq!(f["properties"]["class"], row["class"]);
    }
}

#[tokio::test]
async fn catalog_unit_fire_and_hotspots() {
    let (_tmp, _ws, app) = app();
    let (status, cat) = get(&app, "/api/catalog").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(cat["indicators"].as_array().unwrap().len(), 35);
    assert_eq!(cat["weight_config_id"], "default");

    let (status, unit) = get(&app, "/api/unit/D1-M2-V1").await;
    assert_eq!(status, StatusCode::OK);
    let lineage: Vec<&str> =
        unit["lineage"].as_array().unwrap().iter().map(|l| l["unit_id"].as_str().unwrap()).collect();
    assert_eq!(lineage, ["D1-M2-V1", "D1-M2", "D1"]);
    assert!(unit["raw_indicators"]["CREDIT"].is_null());
    assert!(unit["raw_indicators"]["HH_MEMBERS"].is_number());
    assert_eq!(get(&app, "/api/unit/nowhere").await.0, StatusCode::NOT_FOUND);

    let (status, fire) = get(&app, "/api/fire-risk/summary").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(fire["classes"].as_array().unwrap().len(), 5);
    assert!(fire["total_area_km2"].as_f64().unwrap() > 0.0);

    let (status, hot) = get(&app, "/api/hotspots?level=village").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(hot["units"].as_array().unwrap().len(), 8);
    assert_eq!(get(&app, "/api/hotspots?level=department").await.0, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn whatif_validation_and_isolation() {
    let (_tmp, ws, app) = app();
    let before = snapshot(&ws);
    let (status, err) = call(&app, "POST", "/api/whatif", BAD_WEIGHTS).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(err["error"].as_str().unwrap().contains("sum"), "{err}");
    assert_eq!(call(&app, "POST", "/api/whatif", "{not json").await.0, StatusCode::BAD_REQUEST);

    let exposure = r#"{"id":"exposure-only","determinants":{"Exposure":{"weight":1},"Sensitivity":{"weight":0},"AdaptiveCapacity":{"weight":0}}}"#;
    let (a, b) = tokio::join!(call(&app, "POST", "/api/whatif", exposure), call(&app, "POST", "/api/whatif", "{}"));
    assert_eq!((a.0, b.0), (StatusCode::OK, StatusCode::OK));
    assert_eq!(a.1["weight_config_id"], "exposure-only");
    for row in a.1["results"]["village"].as_array().unwrap() {
        assert_eq!(row["vi"], row["exposure_index"]);
    }
    let (_, batch) = get(&app, "/api/results?level=village").await;
    assert_eq!(b.1["results"]["village"].as_array().unwrap().len(), batch.as_array().unwrap().len());
    assert_eq!(b.1["rankings"]["department"].as_array().unwrap().len(), 2);
    assert_eq!(snapshot(&ws), before);
}

/// The cached-normalization path equals a from-scratch computation.
#[test]
fn cached_normalization_equals_full_recompute() {
    let (_tmp, ws) = computed_workspace();
    let snap = Snapshot::load(&ws).unwrap();
    let w = Workspace::open(&ws).unwrap();
    let weights = validate_weights(default_weights(&w.catalog), &w.catalog).unwrap();
    let full = compute_assessment(&w.village_matrix().unwrap(), &w.catalog, &weights).unwrap();
    assert_eq!(full, snap.results.village);
}
