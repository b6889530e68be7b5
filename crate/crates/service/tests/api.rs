use std::time::Duration;

use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use axum::Router;
use greenhom_core::problem::load_preset;
use greenhom_service::{router, AppState, Completions, Config, Created, ErrorBody, GreenList, PresetList, StateView};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use tower::ServiceExt;

fn app() -> Router {
    app_with(Config {
        debug_replay: true,
        ..Config::default()
    })
}

fn app_with(config: Config) -> Router {
    router(AppState::new(config))
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    (status, to_bytes(resp.into_body(), usize::MAX).await.unwrap().to_vec())
}

async fn json_of<T: DeserializeOwned>(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, T) {
    let (s, b) = call(app, method, uri, body).await;
    (s, serde_json::from_slice(&b).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&b))))
}

async fn session(app: &Router, preset: &str) -> Created {
    let (s, c) = json_of::<Created>(app, "POST", "/sessions", Some(json!({ "preset": preset }))).await;
    assert_eq!(s, StatusCode::CREATED);
    c
}

async fn mutate(app: &Router, id: &str, v: usize, green_only: bool) -> (StatusCode, Vec<u8>) {
    call(app, "POST", &format!("/sessions/{id}/mutate"), Some(json!({ "vertex": v, "green_only": green_only }))).await
}

#[tokio::test]
async fn a2_session_reaches_all_red() {
    let app = app();
    let c = session(&app, "a2").await;
    assert_eq!(c.state.n, 2);
    assert!(!c.state.all_red);
    assert_eq!(c.state.history, Vec::<usize>::new());
    assert_eq!(mutate(&app, &c.id, 1, true).await.0, StatusCode::OK);
    let (s, b) = mutate(&app, &c.id, 2, true).await;
    assert_eq!(s, StatusCode::OK);
    let v: StateView = serde_json::from_slice(&b).unwrap();
    assert!(v.all_red);
    assert_eq!(v.trace, vec![vec![1, 0], vec![0, 1]]);
    assert_eq!(v.history, vec![1, 2]);

    let (s, g) = json_of::<StateView>(&app, "GET", &format!("/sessions/{}", c.id), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(g, v);
}

#[tokio::test]
async fn a2_longer_sequence() {
    let app = app();
    let c = session(&app, "a2").await;
    for v in [2, 1, 2] {
        assert_eq!(mutate(&app, &c.id, v, true).await.0, StatusCode::OK);
    }
    let (_, v) = json_of::<StateView>(&app, "GET", &format!("/sessions/{}", c.id), None).await;
    assert!(v.all_red);
    assert_eq!(v.trace, vec![vec![0, 1], vec![1, 1], vec![1, 0]]);
}

#[tokio::test]
async fn red_vertex_is_rejected_without_state_change() {
    let app = app();
    let c = session(&app, "a2").await;
    mutate(&app, &c.id, 1, true).await;
    let (_, before) = json_of::<StateView>(&app, "GET", &format!("/sessions/{}", c.id), None).await;
    let (s, b) = mutate(&app, &c.id, 1, true).await;
    assert_eq!(s, StatusCode::CONFLICT);
    let e: ErrorBody = serde_json::from_slice(&b).unwrap();
    assert_eq!(e.error, "not_green");
    let (_, after) = json_of::<StateView>(&app, "GET", &format!("/sessions/{}", c.id), None).await;
    assert_eq!(before, after);
}

#[tokio::test]
async fn exploration_mode_records_signed_c_vectors() {
    let app = app();
    let c = session(&app, "a2").await;
    mutate(&app, &c.id, 1, true).await;
    let (s, b) = mutate(&app, &c.id, 1, false).await;
    assert_eq!(s, StatusCode::OK);
    let v: StateView = serde_json::from_slice(&b).unwrap();
    assert_eq!(v.trace, vec![vec![1, 0], vec![-1, 0]]);
    assert!(!v.all_red);
    assert_eq!(v.checksum, c.state.checksum);
}

#[tokio::test]
async fn invalid_vertices_are_422() {
    let app = app();
    let c = session(&app, "a2").await;
    for v in [0, 3, 4, 99] {
        assert_eq!(mutate(&app, &c.id, v, true).await.0, StatusCode::UNPROCESSABLE_ENTITY, "{v}");
        assert_eq!(mutate(&app, &c.id, v, false).await.0, StatusCode::UNPROCESSABLE_ENTITY, "{v}");
    }
}

#[tokio::test]
async fn undo_restores_the_initial_state() {
    let app = app();
    let c = session(&app, "example33").await;
    mutate(&app, &c.id, 3, true).await;
    let (s, v) = json_of::<StateView>(&app, "POST", &format!("/sessions/{}/undo", c.id), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v, c.state);
    let (s, e) = json_of::<ErrorBody>(&app, "POST", &format!("/sessions/{}/undo", c.id), None).await;
    assert_eq!(s, StatusCode::CONFLICT);
    assert_eq!(e.error, "empty_history");
}

#[tokio::test]
async fn green_list_and_completions() {
    let app = app();
    let c = session(&app, "a2").await;
    let (_, g) = json_of::<GreenList>(&app, "GET", &format!("/sessions/{}/green", c.id), None).await;
    assert_eq!(g.green, vec![1, 2]);

    let (s, all) = json_of::<Completions>(&app, "GET", &format!("/sessions/{}/completions", c.id), None).await;
    assert_eq!(s, StatusCode::OK);
    let seqs: Vec<Vec<usize>> = all.completions.iter().map(|x| x.vertices.clone()).collect();
    assert_eq!(seqs, vec![vec![1, 2], vec![2, 1, 2]]);
    assert!(!all.truncated);

    let (_, one) = json_of::<Completions>(&app, "GET", &format!("/sessions/{}/completions?limit=1", c.id), None).await;
    assert_eq!(one.completions.len(), 1);

    mutate(&app, &c.id, 2, true).await;
    let (_, rest) = json_of::<Completions>(&app, "GET", &format!("/sessions/{}/completions", c.id), None).await;
    assert_eq!(rest.completions.len(), 1);
    assert_eq!(rest.completions[0].vertices, vec![1, 2]);
    assert_eq!(rest.completions[0].c_vectors, vec![vec![1, 1], vec![1, 0]]);
}

#[tokio::test]
async fn exhausted_completion_budget_is_503_with_partial_results() {
    let app = app_with(Config {
        completion_budget: 20,
        ..Config::default()
    });
    let c = session(&app, "example33").await;
    let (s, b) = json_of::<Completions>(&app, "GET", &format!("/sessions/{}/completions?limit=1000", c.id), None).await;
    assert_eq!(s, StatusCode::SERVICE_UNAVAILABLE);
    assert!(b.truncated);
    assert_eq!(b.states_visited, 20);
}

#[tokio::test]
async fn unknown_and_deleted_sessions_are_404() {
    let app = app();
    assert_eq!(call(&app, "GET", "/sessions/nope", None).await.0, StatusCode::NOT_FOUND);
    let c = session(&app, "a1").await;
    assert_eq!(call(&app, "DELETE", &format!("/sessions/{}", c.id), None).await.0, StatusCode::NO_CONTENT);
    assert_eq!(call(&app, "GET", &format!("/sessions/{}", c.id), None).await.0, StatusCode::NOT_FOUND);
    assert_eq!(call(&app, "DELETE", &format!("/sessions/{}", c.id), None).await.0, StatusCode::NOT_FOUND);
    assert_eq!(mutate(&app, "nope", 1, true).await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn idle_sessions_expire() {
    let app = app_with(Config {
        idle_timeout: Duration::from_millis(50),
        ..Config::default()
    });
    let c = session(&app, "a2").await;
    assert_eq!(call(&app, "GET", &format!("/sessions/{}", c.id), None).await.0, StatusCode::OK);
    tokio::time::sleep(Duration::from_millis(120)).await;
    assert_eq!(call(&app, "GET", &format!("/sessions/{}", c.id), None).await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn session_creation_variants() {
    let app = app();
    let text = "format_version = 1\n[quiver]\nvertices = 2\narrows = [{ name = \"x\", from = 2, to = 1 }]\n";
    let (s, c) = json_of::<Created>(&app, "POST", "/sessions", Some(json!({ "problem": text }))).await;
    assert_eq!(s, StatusCode::CREATED);
    assert_eq!(c.state.colors.len(), 2);

    let (s, e) = json_of::<ErrorBody>(&app, "POST", "/sessions", Some(json!({ "problem": "[quiver" }))).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(e.message.contains("line 1"), "{}", e.message);
    assert_eq!(call(&app, "POST", "/sessions", Some(json!({ "preset": "e8" }))).await.0, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(call(&app, "POST", "/sessions", None).await.0, StatusCode::UNPROCESSABLE_ENTITY);

    let served = app_with(Config {
        default_problem: Some(load_preset("a3").unwrap()),
        ..Config::default()
    });
    let (s, c) = json_of::<Created>(&served, "POST", "/sessions", None).await;
    assert_eq!(s, StatusCode::CREATED);
    assert_eq!(c.state.problem, "a3");
    assert_ne!(c.id, session(&served, "a3").await.id);
}

#[tokio::test]
async fn presets_are_listed() {
    let (s, p) = json_of::<PresetList>(&app(), "GET", "/presets", None).await;
    assert_eq!(s, StatusCode::OK);
    let names: Vec<&str> = p.presets.iter().map(|x| x.name.as_str()).collect();
    assert_eq!(names, vec!["a1", "a2", "a3", "example33"]);
    let ex = &p.presets[3];
    assert_eq!((ex.vertices, ex.arrows), (4, 5));
    assert!(ex.b_specs.contains(&"B".to_string()) && ex.b_specs.contains(&"Bprime".to_string()));
}

#[tokio::test]
async fn example_state_shape() {
    let app = app();
    let c = session(&app, "example33").await;
    // 5 quiver arrows plus 4 framing arrows, 4 mutable + 4 frozen vertices
    assert_eq!(c.state.arrows.len(), 9);
    assert_eq!(c.state.c_matrix.len(), 4);
    assert!(c.state.colors.iter().all(|v| v.color == greenhom_core::quiver::VertexColor::Green));
    assert_eq!(c.state.checksum.len(), 64);
}

#[tokio::test]
async fn cors_headers_are_sent() {
    let req = Request::builder()
        .method("GET")
        .uri("/presets")
        .header("origin", "http://localhost:5173")
        .body(Body::empty())
        .unwrap();
    let resp = app().oneshot(req).await.unwrap();
    assert!(resp.headers().contains_key("access-control-allow-origin"));
}

#[tokio::test]
async fn concurrent_mutations_are_serialized() {
    let app = app();
    let c = session(&app, "example33").await;
    let tasks: Vec<_> = (0..8)
        .map(|k| {
            let (app, id) = (app.clone(), c.id.clone());
            tokio::spawn(async move { mutate(&app, &id, 1 + k % 4, false).await.0 })
        })
        .collect();
    for t in tasks {
        assert_eq!(t.await.unwrap(), StatusCode::OK);
    }
    let (s, v) = json_of::<StateView>(&app, "GET", &format!("/sessions/{}", c.id), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v.history.len(), 8);
}
