use std::collections::BTreeSet;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use cnlasp_service::{app, AppState, CommitJson, CreatedJson, ErrorBody, LookaheadJson, ModelJson, RetractJson, SentencesJson, StatusJson};
use http_body_util::BodyExt;
use serde::de::DeserializeOwned;
use serde_json::json;
use tower::ServiceExt;

const STUDENTS: [&str; 6] = [
    "Every student who works and who is not provably absent is successful.",
    "If a student does not provably work then the student does not work.",
    "John is a student who works.",
    "Sue is a student and works.",
    "Mary Ann who is a student is absent.",
    "Exclude that a student who cheats is successful.",
];

async fn call(app: &Router, method: Method, uri: &str, body: Option<serde_json::Value>) -> (StatusCode, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string()))
            .unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    (status, resp.into_body().collect().await.unwrap().to_bytes().to_vec())
}

async fn json<T: DeserializeOwned>(app: &Router, method: Method, uri: &str, body: Option<serde_json::Value>) -> (StatusCode, T) {
    let (s, b) = call(app, method, uri, body).await;
    (s, serde_json::from_slice(&b).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&b))))
}

async fn session(app: &Router) -> String {
    let (s, c): (_, CreatedJson) = json(app, Method::POST, "/sessions", None).await;
    assert_eq!(s, StatusCode::OK);
    c.session_id
}

async fn commit(app: &Router, id: &str, text: &str) -> (StatusCode, Vec<u8>) {
    call(app, Method::POST, &format!("/sessions/{id}/sentences"), Some(json!({ "text": text }))).await
}

#[tokio::test]
async fn fresh_session_is_empty_and_satisfiable() {
    let app = app(AppState::default());
    let id = session(&app).await;
    let (s, m): (_, ModelJson) = json(&app, Method::GET, &format!("/sessions/{id}/model"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(m.status, StatusJson::Satisfiable);
    assert!(m.model.is_empty());
    let (s, kb) = call(&app, Method::GET, &format!("/sessions/{id}/kb"), None).await;
    assert_eq!((s, kb.len()), (StatusCode::OK, 0));
}

#[tokio::test]
async fn unknown_session_is_404() {
    let app = app(AppState::default());
    for (m, uri) in [
        (Method::GET, "/sessions/nope/model"),
        (Method::GET, "/sessions/nope/kb"),
        (Method::DELETE, "/sessions/nope/sentences/last"),
    ] {
        let (s, e): (_, ErrorBody) = json(&app, m, uri, None).await;
        assert_eq!(s, StatusCode::NOT_FOUND);
        assert_eq!(e.error, "UnknownSession");
    }
    let (s, _) = call(&app, Method::POST, "/sessions/nope/lookahead", Some(json!({"prefix": ""}))).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn lookahead_endpoint() {
    let app = app(AppState::default());
    let id = session(&app).await;
    let uri = format!("/sessions/{id}/lookahead");
    let (s, r): (_, LookaheadJson) = json(&app, Method::POST, &uri, Some(json!({"prefix": "Every student"}))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!((r.depth_used, r.fragments), (2, 2));
    assert!(r.suggestions.iter().any(|g| g.surfaces.contains(&"who".to_string())));

    let (_, r): (_, LookaheadJson) = json(&app, Method::POST, &uri, Some(json!({"prefix": ""}))).await;
    let starts: BTreeSet<&str> = r.suggestions.iter().flat_map(|g| g.surfaces.iter().map(String::as_str)).collect();
    assert!(starts.contains("Every") && starts.contains("John") && starts.contains("If"));

    let (s, e): (_, ErrorBody) = json(&app, Method::POST, &uri, Some(json!({"prefix": "student Every"}))).await;
    assert_eq!((s, e.error.as_str()), (StatusCode::UNPROCESSABLE_ENTITY, "NoContinuation"));

    let (s, e): (_, ErrorBody) = json(&app, Method::POST, &uri, Some(json!({"prefix": "Every sheep"}))).await;
    assert_eq!((s, e.error.as_str(), e.position), (StatusCode::UNPROCESSABLE_ENTITY, "UnknownToken", Some(2)));
}

#[tokio::test]
async fn authoring_loop() {
    let app = app(AppState::default());
    let id = session(&app).await;

    let (s, body) = commit(&app, &id, STUDENTS[0]).await;
    assert_eq!(s, StatusCode::OK);
    let c: CommitJson = serde_json::from_slice(&body).unwrap();
    assert_eq!((c.trees, c.rules.len(), c.rules[0].id), (1, 1, 1));
    let (_, kb) = call(&app, Method::GET, &format!("/sessions/{id}/kb"), None).await;
    assert_eq!(String::from_utf8(kb).unwrap().lines().count(), 5);

    for text in &STUDENTS[1..] {
        let (s, _) = commit(&app, &id, text).await;
        assert_eq!(s, StatusCode::OK, "{text}");
    }
    let (_, m): (_, ModelJson) = json(&app, Method::GET, &format!("/sessions/{id}/model"), None).await;
    assert_eq!((m.status.clone(), m.model.len()), (StatusJson::Satisfiable, 9));
    assert!(m.model.contains(&"in_AS(lit(func(neg(work)), arg(mary_ann)))".to_string()));

    let mut last = None;
    for text in ["Ray is a student.", "Ray works.", "Ray cheats."] {
        let (s, body) = commit(&app, &id, text).await;
        assert_eq!(s, StatusCode::OK);
        last = Some(serde_json::from_slice::<CommitJson>(&body).unwrap());
    }
    let last = last.unwrap();
    assert_eq!(last.model.status, StatusJson::Unsatisfiable);
    assert_eq!(last.model.violated, vec![9]);
    assert!(last.model.model.is_empty());

    let (s, r): (_, RetractJson) = json(&app, Method::DELETE, &format!("/sessions/{id}/sentences/last"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(r.retracted.as_deref(), Some("Ray cheats."));
    assert_eq!(r.model.status, StatusJson::Satisfiable);
}

#[tokio::test]
async fn errors_leave_the_session_unchanged() {
    let app = app(AppState::default());
    let id = session(&app).await;
    commit(&app, &id, "John is a student.").await;
    let (_, before) = call(&app, Method::GET, &format!("/sessions/{id}/kb"), None).await;
    for (text, kind) in [
        ("student John works.", "NoParse"),
        ("The absent works.", "NoParse"),
        ("The sheep works.", "UnknownToken"),
        ("John works. Sue works.", "NotOneSentence"),
        ("John is not provably absent.", "NoParse"),
    ] {
        let (s, body) = commit(&app, &id, text).await;
        assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY, "{text}");
        let e: ErrorBody = serde_json::from_slice(&body).unwrap();
        assert_eq!(e.error, kind, "{text}");
    }
    let (_, after) = call(&app, Method::GET, &format!("/sessions/{id}/kb"), None).await;
    assert_eq!(before, after);
}

#[tokio::test]
async fn replay_gives_the_same_kb() {
    let app = app(AppState::default());
    let first = session(&app).await;
    for text in STUDENTS {
        commit(&app, &first, text).await;
    }
    let (_, listed): (_, SentencesJson) = json(&app, Method::GET, &format!("/sessions/{first}/sentences"), None).await;
    assert_eq!(listed.sentences, STUDENTS);
    let second = session(&app).await;
    for text in &listed.sentences {
        commit(&app, &second, text).await;
    }
    let (_, a) = call(&app, Method::GET, &format!("/sessions/{first}/kb"), None).await;
    let (_, b) = call(&app, Method::GET, &format!("/sessions/{second}/kb"), None).await;
    assert_eq!(a, b);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_creation_gives_distinct_ids() {
    let state = AppState::default();
    let app = app(state.clone());
    let tasks: Vec<_> = (0..100)
        .map(|_| {
            let app = app.clone();
            tokio::spawn(async move { session(&app).await })
        })
        .collect();
    let mut ids = BTreeSet::new();
    for t in tasks {
        ids.insert(t.await.unwrap());
    }
    assert_eq!(ids.len(), 100);
    assert_eq!(state.session_count(), 100);
}

#[tokio::test]
async fn cors_headers_are_present() {
    let app = app(AppState::default());
    let req = Request::builder()
        .method(Method::POST)
        .uri("/sessions")
        .header("origin", "http://localhost:5173")
        .body(Body::empty())
        .unwrap();
    let resp = app.oneshot(req).await.unwrap();
    assert!(resp.headers().contains_key("access-control-allow-origin"));
}
