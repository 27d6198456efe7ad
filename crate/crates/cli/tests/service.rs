//! HTTP routes, driven in-process.

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use splforge_cli::service::router;
use tower::ServiceExt;

fn webspl() -> splforge_core::fm::FeatureModel {
    splforge_cli::commands::load_model(&std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/webspl.fm"))
        .unwrap()
        .model
}

async fn call(req: Request<Body>) -> (StatusCode, Value) {
    let resp = router(webspl(), None).oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

async fn get(uri: &str) -> (StatusCode, Value) {
    call(Request::get(uri).body(Body::empty()).unwrap()).await
}

async fn post(uri: &str, body: impl Into<Body>) -> (StatusCode, Value) {
    call(Request::post(uri).header("content-type", "application/json").body(body.into()).unwrap()).await
}

fn names(v: &Value) -> Vec<&str> {
    v.as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect()
}

#[tokio::test]
async fn count_endpoint() {
    assert_eq!(get("/api/count").await, (StatusCode::OK, json!({ "products": 18 })));
    let (s, v) = get("/api/count?selected=DataExport&deselected=EnUS").await;
    assert_eq!(s, StatusCode::OK);
    assert!(v["products"].as_u64().unwrap() < 18);
    let (s, v) = get("/api/count?selected=Ghost").await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(v["error"].as_str().unwrap().contains("Ghost"));
    assert_eq!(get("/api/count?bogus=1").await.0, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn propagate_endpoint() {
    let (s, v) = post("/api/propagate", r#"{"selected":["PermissionManagement"]}"#).await;
    assert_eq!(s, StatusCode::OK);
    assert!(names(&v["forcedSelected"]).contains(&"UserManagement"));
    assert_eq!(v["conflict"], false);
    let (_, v) = post("/api/propagate", r#"{"deselected":["WebSPL"]}"#).await;
    assert_eq!(v["conflict"], true);
}

#[tokio::test]
async fn validate_endpoint() {
    let mandatory = json!({
        "selected": ["WebSPL", "DataManagement", "Internationalization", "PtBR", "EnUS",
                     "UserProfileControl", "ProfileManagement"],
        "deselected": ["DataExport", "UserManagement", "PermissionManagement"],
    });
    let (s, v) = post("/api/validate", mandatory.to_string()).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["valid"], true);
    assert_eq!(v["violations"], json!([]));

    let (_, v) = post("/api/validate", r#"{"deselected":["DataManagement"]}"#).await;
    assert_eq!(v["valid"], false);
    assert_eq!(v["conflict"], true);
    assert!(!v["undecided"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn malformed_and_unknown_inputs() {
    assert_eq!(post("/api/propagate", "{not json").await.0, StatusCode::BAD_REQUEST);
    assert_eq!(post("/api/validate", r#"{"selected":"WebSPL"}"#).await.0, StatusCode::BAD_REQUEST);
    assert_eq!(post("/api/validate", r#"{"chosen":[]}"#).await.0, StatusCode::BAD_REQUEST);
    let (s, v) = post("/api/propagate", r#"{"selected":["Nope"]}"#).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(v["error"].is_string());
    let (s, _) = post("/api/validate", r#"{"selected":["EnUS"],"deselected":["EnUS"]}"#).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn model_endpoint() {
    let (s, v) = get("/api/model").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["root"], "WebSPL");
    assert_eq!(v["features"].as_array().unwrap().len(), 10);
    assert_eq!(v["features"][0]["name"], "WebSPL");
    assert!(v["groups"].as_array().unwrap().iter().any(|g| g["kind"] == "or"));
    assert!(!v["constraints"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn derive_endpoint() {
    let body = json!({
        "selected": ["WebSPL", "DataManagement", "Internationalization", "PtBR", "EnUS",
                     "UserProfileControl", "ProfileManagement"],
        "deselected": ["DataExport", "UserManagement", "PermissionManagement"],
        "name": "mandatory-only",
    });
    let (s, v) = post("/api/derive", body.to_string()).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["modules"].as_array().unwrap().len(), 5);
    assert_eq!(v["cycleCount"], 0);
    let golden = include_str!("../../core/fixtures/golden/mandatory-only.manifest");
    assert_eq!(v["text"], golden);

    let (s, v) = post("/api/derive", r#"{"selected":["PermissionManagement"]}"#).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(v["error"].is_string());

    let invalid = json!({
        "selected": ["WebSPL", "DataManagement", "Internationalization", "PtBR", "EnUS",
                     "UserProfileControl", "ProfileManagement", "PermissionManagement"],
        "deselected": ["DataExport", "UserManagement"],
    });
    let (s, v) = post("/api/derive", invalid.to_string()).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["violations"][0]["kind"], "requires", "{v}");
}

#[tokio::test]
async fn cors_headers_present() {
    let req = Request::get("/api/model").header("origin", "http://example.test").body(Body::empty()).unwrap();
    let resp = router(webspl(), None).oneshot(req).await.unwrap();
    assert!(resp.headers().contains_key("access-control-allow-origin"));
}

#[tokio::test]
async fn static_dir_fallback() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<p>hi</p>").unwrap();
    let resp = router(webspl(), Some(dir.path()))
        .oneshot(Request::get("/index.html").body(Body::empty()).unwrap())
        .await
        .unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    assert_eq!(resp.into_body().collect().await.unwrap().to_bytes().as_ref(), b"<p>hi</p>");
}
