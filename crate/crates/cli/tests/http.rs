use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use boxdiag_cli::server::{router, AppState};

fn dir(sub: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join(sub)
}

fn read(sub: &str, name: &str) -> String {
    std::fs::read_to_string(dir(sub).join(name)).unwrap()
}

fn app() -> Router {
    router(Arc::new(AppState::new(None)))
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req.header("content-type", "application/json").body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let v = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, v)
}

async fn post(app: &Router, uri: &str, body: Value) -> (StatusCode, Value) {
    call(app, "POST", uri, Some(body)).await
}

async fn get(app: &Router, uri: &str) -> (StatusCode, Value) {
    call(app, "GET", uri, None).await
}

async fn upload(app: &Router, program: &str, spec: &str) -> (u64, u64) {
    let (s, p) = post(app, "/programs", json!({"text": program})).await;
    assert_eq!(s, StatusCode::CREATED, "{p}");
    let (s, sp) = post(app, "/specs", json!({"text": spec})).await;
    assert_eq!(s, StatusCode::CREATED, "{sp}");
    (p["id"].as_u64().unwrap(), sp["id"].as_u64().unwrap())
}

const HUMAN_PROGRAM: &str = "p(X) :- q(X).\nq(Y).\n";
const HUMAN_SPEC: &str = "%% corr\np(a).\nq(a).\n";

#[tokio::test]
async fn uploads_report_parse_errors() {
    let app = app();
    let (s, v) = post(&app, "/programs", json!({"text": "p(X :- q."})).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["error"]["kind"], "parse");
    assert_eq!(v["error"]["line"], 1);
    assert!(v["error"]["column"].as_u64().unwrap() > 0);

    let (s, v) = post(&app, "/specs", json!({"text": "%% corr\np(.\n"})).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["error"]["kind"], "spec");
    assert_eq!(v["error"]["line"], 2);

    let (s, v) = post(&app, "/specs", json!({"text": HUMAN_SPEC})).await;
    assert_eq!(s, StatusCode::CREATED);
    assert_eq!(v["sections"], json!({"corr": true, "compl": false}));
}

#[tokio::test]
async fn unknown_ids_and_bad_requests() {
    let app = app();
    let (s, v) = get(&app, "/sessions/42").await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(v["error"]["kind"], "not-found");
    let (s, _) = post(&app, "/sessions/42/answer", json!({"verdict": "yes"})).await;
    assert_eq!(s, StatusCode::NOT_FOUND);

    let (p, sp) = upload(&app, HUMAN_PROGRAM, HUMAN_SPEC).await;
    let (s, _) = post(&app, "/sessions", json!({"program": 99, "spec": sp, "kind": "incorrectness", "query": "p(X)"})).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (s, v) = post(&app, "/sessions", json!({"program": p, "spec": sp, "kind": "incorrectness", "query": "p(X"})).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["error"]["kind"], "parse");
    // the spec has no compl section
    let (s, v) = post(&app, "/sessions", json!({"program": p, "spec": sp, "kind": "incompleteness", "query": "p(a)"})).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["error"]["kind"], "spec");
}

#[tokio::test]
async fn machine_session_matches_cli_json() {
    let app = app();
    let (p, sp) = upload(&app, &read("fixtures", "even_bug.pl"), &read("fixtures", "even.spec")).await;
    let (s, v) =
        post(&app, "/sessions", json!({"program": p, "spec": sp, "kind": "incorrectness", "query": "even(s(0))"})).await;
    assert_eq!(s, StatusCode::CREATED);
    assert_eq!(v["state"], "done");
    let id = v["id"].as_u64().unwrap();

    let golden: Value = serde_json::from_str(&read("golden", "even_corr.json")).unwrap();
    let (s, r) = get(&app, &format!("/sessions/{id}/result")).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(r, golden);

    let (s, v) = get(&app, &format!("/sessions/{id}/question")).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(v["state"], "done");
    let (s, v) = post(&app, &format!("/sessions/{id}/answer"), json!({"verdict": "no"})).await;
    assert_eq!(s, StatusCode::CONFLICT);
    assert_eq!(v["error"]["kind"], "no-question");
}

#[tokio::test]
async fn incompleteness_session_matches_cli_json() {
    let app = app();
    let (p, sp) = upload(&app, &read("fixtures", "even_fact.pl"), &read("fixtures", "even.spec")).await;
    let (_, v) =
        post(&app, "/sessions", json!({"program": p, "spec": sp, "kind": "incompleteness", "query": "even(s(s(0)))"}))
            .await;
    assert_eq!(v["state"], "done");
    let golden: Value = serde_json::from_str(&read("golden", "even_compl.json")).unwrap();
    assert_eq!(v["result"], golden);
}

#[tokio::test]
async fn human_session_walk_and_replay() {
    let journal_dir = std::env::temp_dir().join(format!("boxdiag-http-{}", std::process::id()));
    std::fs::create_dir_all(&journal_dir).unwrap();
    let app = router(Arc::new(AppState::new(Some(journal_dir.clone()))));
    let (p, sp) = upload(&app, HUMAN_PROGRAM, HUMAN_SPEC).await;
    let new = json!({"program": p, "spec": sp, "kind": "incorrectness", "query": "p(X)"});
    let (s, v) = post(&app, "/sessions", new.clone()).await;
    assert_eq!(s, StatusCode::CREATED);
    assert_eq!(v["state"], "awaiting_answer");
    let id = v["id"].as_u64().unwrap();

    let (s, q) = get(&app, &format!("/sessions/{id}/question")).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(q["seq"], 1);
    assert_eq!(q["role"], "corr");
    assert_eq!(q["atom"]["text"], "p(_G2)");
    assert!(!q["prompt"].as_str().unwrap().is_empty());

    let (s, r) = get(&app, &format!("/sessions/{id}/result")).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(r["state"], "awaiting_answer");

    let (s, v) = post(&app, &format!("/sessions/{id}/answer"), json!({"seq": 1, "verdict": "maybe"})).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY, "{v}");
    let (s, v) = post(&app, &format!("/sessions/{id}/answer"), json!({"seq": 7, "verdict": "no"})).await;
    assert_eq!(s, StatusCode::CONFLICT);
    assert_eq!(v["error"]["kind"], "stale-question");

    let (s, v) = post(&app, &format!("/sessions/{id}/answer"), json!({"seq": 1, "verdict": "no"})).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["state"], "awaiting_answer");
    assert_eq!(v["pending_question"]["seq"], 2);
    assert_eq!(v["pending_question"]["atom"]["text"], "q(_G2)");
    let (_, v) = post(&app, &format!("/sessions/{id}/answer"), json!({"verdict": "yes"})).await;
    assert_eq!(v["state"], "done");
    assert_eq!(v["result"]["clause"], 1);
    assert_eq!(v["result"]["clause_text"], "p(X) :- q(X).");
    assert_eq!(v["result"]["instance"]["head"]["text"], "p(_G2)");

    let (_, journal) = get(&app, &format!("/sessions/{id}/journal")).await;
    let entries = journal.as_array().unwrap();
    assert_eq!(entries.len(), 2);
    assert_eq!(entries[0]["seq"], 1);
    assert_eq!(entries[0]["verdict"], "no");
    assert_eq!(entries[1]["verdict"], "yes");
    let on_disk: Value =
        serde_json::from_slice(&std::fs::read(journal_dir.join(format!("session-{id}.json"))).unwrap()).unwrap();
    assert_eq!(on_disk, journal);

    // a new session fed the journal reaches the same result without asking
    let mut replay = new.clone();
    replay["answers"] = journal.clone();
    let (s, v2) = post(&app, "/sessions", replay).await;
    assert_eq!(s, StatusCode::CREATED);
    assert_eq!(v2["state"], "done");
    assert_eq!(v2["result"], v["result"]);
    assert_eq!(v2["journal"].as_array().unwrap().len(), 2);
    std::fs::remove_dir_all(&journal_dir).ok();
}

#[tokio::test]
async fn undecided_answer_stops_the_session() {
    let app = app();
    let (p, sp) = upload(&app, HUMAN_PROGRAM, HUMAN_SPEC).await;
    let (_, v) = post(&app, "/sessions", json!({"program": p, "spec": sp, "kind": "incorrectness", "query": "p(X)"})).await;
    let id = v["id"].as_u64().unwrap();
    let (_, v) = post(&app, &format!("/sessions/{id}/answer"), json!({"verdict": "?"})).await;
    assert_eq!(v["state"], "undecided");
    assert_eq!(v["stop"]["kind"], "undecided");
    let (s, r) = get(&app, &format!("/sessions/{id}/result")).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(r["stop"]["kind"], "undecided");
}

#[tokio::test]
async fn proof_tree_and_trace_views() {
    let app = app();
    let (p, sp) = upload(&app, &read("fixtures", "even_bug.pl"), &read("fixtures", "even.spec")).await;
    let (_, v) =
        post(&app, "/sessions", json!({"program": p, "spec": sp, "kind": "incorrectness", "query": "even(s(s(0)))"}))
            .await;
    let id = v["id"].as_u64().unwrap();

    let (s, t) = get(&app, &format!("/sessions/{id}/prooftree")).await;
    assert_eq!(s, StatusCode::OK);
    let tree = &t["tree"];
    assert_eq!(tree["atom"]["text"], "even(s(s(0)))");
    assert_eq!(tree["clause"], 2);
    assert_eq!(tree["path"], "/");
    assert_eq!(tree["children"][0]["children"][0]["atom"]["text"], "even(0)");
    assert_eq!(tree["children"][0]["children"][0]["path"], "/0/0");
    let (s, _) = get(&app, &format!("/sessions/{id}/prooftree?answer=2")).await;
    assert_eq!(s, StatusCode::NOT_FOUND);

    let (s, tr) = get(&app, &format!("/sessions/{id}/trace")).await;
    assert_eq!(s, StatusCode::OK);
    let lines: Vec<&str> = tr["events"].as_array().unwrap().iter().map(|e| e["line"].as_str().unwrap()).collect();
    assert_eq!(lines.first(), Some(&"1 1 Call: even(s(s(0)))"));
    assert_eq!(lines.last(), Some(&"1 1 Exit: even(s(s(0)))"));
    assert_eq!(tr["answers"][0]["text"], "even(s(s(0)))");
    assert_eq!(tr["search_trace"]["entries"][0]["call"]["text"], "even(s(0))");
    let (_, sic) = get(&app, &format!("/sessions/{id}/trace?sicstus=true")).await;
    assert!(sic["events"].as_array().unwrap().len() <= tr["events"].as_array().unwrap().len());
}
