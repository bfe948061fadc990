use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use morphsynth::{compose_part, fixtures, ParetoSet, ProblemDocument, WhatIfDelta};
use morphsynth_app::api::{router, Solved};
use morphsynth_app::error::{ErrorBody, FailureClass};
use morphsynth_app::solve::{ComposeResult, KnapsackResult, RankResult, TrajectoryResult};
use morphsynth_app::store::{ProblemStore, ProblemSummary, StoredProblem};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use tower::ServiceExt;

struct Harness {
    app: Router,
    store: Arc<ProblemStore>,
    _dir: tempfile::TempDir,
}

fn harness() -> Harness {
    let dir = tempfile::tempdir().unwrap();
    let store = Arc::new(ProblemStore::open(dir.path()).unwrap());
    Harness { app: router(store.clone(), None), store, _dir: dir }
}

async fn call(app: &Router, method: &str, uri: &str, body: impl Into<Option<String>>) -> (StatusCode, Vec<u8>) {
    let body = body.into().map_or_else(Body::empty, Body::from);
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json").body(body).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    (status, resp.into_body().collect().await.unwrap().to_bytes().to_vec())
}

async fn call_json<T: DeserializeOwned>(app: &Router, method: &str, uri: &str, body: impl Into<Option<String>>) -> (StatusCode, T) {
    let (status, bytes) = call(app, method, uri, body).await;
    let value = serde_json::from_slice(&bytes).unwrap_or_else(|e| panic!("{uri}: {e}: {}", String::from_utf8_lossy(&bytes)));
    (status, value)
}

async fn seeded() -> Harness {
    let h = harness();
    for (name, text) in fixtures::ALL {
        let (status, _) = call(&h.app, "POST", &format!("/api/problems?id={name}"), text.to_string()).await;
        assert_eq!(status, StatusCode::CREATED);
    }
    h
}

#[tokio::test]
async fn create_list_and_fetch() {
    let h = harness();
    let (status, list) = call_json::<Vec<ProblemSummary>>(&h.app, "GET", "/api/problems", None).await;
    assert_eq!((status, list.len()), (StatusCode::OK, 0));

    let (status, created) = call_json::<StoredProblem>(&h.app, "POST", "/api/problems", fixtures::EXAMPLE1.to_string()).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!((created.id.as_str(), created.revision), ("p1", 1));
    assert_eq!(created.document, fixtures::example1());

    let (_, second) = call_json::<StoredProblem>(&h.app, "POST", "/api/problems", fixtures::EXAMPLE2.to_string()).await;
    assert_eq!(second.id, "p2");
    let (_, named) = call_json::<StoredProblem>(&h.app, "POST", "/api/problems?id=web", fixtures::EXAMPLE3.to_string()).await;
    assert_eq!(named.id, "web");

    let (_, list) = call_json::<Vec<ProblemSummary>>(&h.app, "GET", "/api/problems", None).await;
    let ids: Vec<_> = list.iter().map(|p| p.id.as_str()).collect();
    assert_eq!(ids, ["p1", "p2", "web"]);
    assert_eq!(list[0].name.as_deref(), Some("example1"));

    let (status, fetched) = call_json::<StoredProblem>(&h.app, "GET", "/api/problems/web", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(fetched, named);
}

#[tokio::test]
async fn create_rejects_bad_ids_and_duplicates() {
    let h = harness();
    let (status, _) = call(&h.app, "POST", "/api/problems?id=a", fixtures::EXAMPLE1.to_string()).await;
    assert_eq!(status, StatusCode::CREATED);
    for uri in ["/api/problems?id=a", "/api/problems?id=..%2Fescape"] {
        let (status, body) = call_json::<ErrorBody>(&h.app, "POST", uri, fixtures::EXAMPLE1.to_string()).await;
        assert_eq!((status, body.error), (StatusCode::BAD_REQUEST, FailureClass::BadRequest), "{uri}");
    }
}

#[tokio::test]
async fn unknown_id_is_404() {
    let h = harness();
    for (method, uri) in [("GET", "/api/problems/zz"), ("POST", "/api/problems/zz/compose"), ("POST", "/api/problems/zz/whatif")] {
        let (status, body) = call_json::<ErrorBody>(&h.app, method, uri, None).await;
        assert_eq!((status, body.error), (StatusCode::NOT_FOUND, FailureClass::NotFound), "{uri}");
    }
    let put = json!({ "revision": 1, "document": fixtures::example1() }).to_string();
    let (status, _) = call(&h.app, "PUT", "/api/problems/zz", put).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn schema_violations_are_400_with_location() {
    let h = harness();
    let mut doc: Value = serde_json::from_str(fixtures::EXAMPLE1).unwrap();
    doc["compatibility"][2]["note"] = json!("x");
    let (status, body) = call_json::<ErrorBody>(&h.app, "POST", "/api/problems", doc.to_string()).await;
    assert_eq!((status, body.error), (StatusCode::BAD_REQUEST, FailureClass::InvalidProblem));
    assert_eq!(body.details.unwrap()["path"], "compatibility[2].note");

    let (status, body) = call_json::<ErrorBody>(&h.app, "POST", "/api/problems", "{\"format_version\":".to_string()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(body.message.contains("syntax error"), "{}", body.message);

    let mut broken = fixtures::example1();
    broken.tree.find_mut("D").unwrap().alternatives[1].estimates[2] = 9;
    let (status, body) = call_json::<ErrorBody>(&h.app, "POST", "/api/problems", broken.to_json()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let violations = &body.details.unwrap()["violations"];
    assert_eq!(violations[0]["location"], "alternative `D/D2`");
    assert!(call_json::<Vec<ProblemSummary>>(&h.app, "GET", "/api/problems", None).await.1.is_empty());
}

#[tokio::test]
async fn put_checks_revision() {
    let h = seeded().await;
    let mut edited = fixtures::example1();
    edited.description = Some("edited".into());

    let stale = json!({ "revision": 7, "document": edited }).to_string();
    let (status, body) = call_json::<ErrorBody>(&h.app, "PUT", "/api/problems/example1", stale).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body.details.unwrap(), json!({ "current": 1, "given": 7 }));
    let (_, unchanged) = call_json::<StoredProblem>(&h.app, "GET", "/api/problems/example1", None).await;
    assert_eq!((unchanged.revision, unchanged.document), (1, fixtures::example1()));

    let fresh = json!({ "revision": 1, "document": edited }).to_string();
    let (status, updated) = call_json::<StoredProblem>(&h.app, "PUT", "/api/problems/example1", fresh.clone()).await;
    assert_eq!((status, updated.revision), (StatusCode::OK, 2));
    assert_eq!(updated.document, edited);

    let (status, _) = call(&h.app, "PUT", "/api/problems/example1", fresh).await;
    assert_eq!(status, StatusCode::CONFLICT, "the same revision cannot be written twice");

    let mut invalid = serde_json::to_value(&edited).unwrap();
    invalid["criteria"][0]["weight"] = json!(0);
    let body = json!({ "revision": 2, "document": invalid }).to_string();
    let (status, _) = call(&h.app, "PUT", "/api/problems/example1", body).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(h.store.get("example1").unwrap().revision, 2);

    let reopened = ProblemStore::open(h.store.dir()).unwrap();
    assert_eq!(*reopened.get("example1").unwrap(), updated);
}

#[tokio::test]
async fn compose_returns_quality_strings() {
    let h = seeded().await;
    let body = json!({ "scenario": "provider" }).to_string();
    let (status, raw) = call_json::<Value>(&h.app, "POST", "/api/problems/example1/compose", body.clone()).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(raw["revision"], 1);
    let qualities: Vec<&str> = raw["result"]["pareto"]["decisions"].as_array().unwrap().iter().map(|d| d["quality"].as_str().unwrap()).collect();
    assert!(!qualities.is_empty());
    assert!(qualities.iter().all(|q| q.starts_with('(') && q.contains(';') && q.ends_with(')')), "{qualities:?}");

    let (_, solved) = call_json::<Solved<ComposeResult>>(&h.app, "POST", "/api/problems/example1/compose", body).await;
    let doc = fixtures::example1();
    let direct = compose_part(&doc.to_model(), "S", doc.priorities("provider").unwrap()).unwrap();
    assert_eq!(solved.result.pareto, direct);

    let body = json!({ "scenario": "provider", "node": "B" }).to_string();
    let (_, solved) = call_json::<Solved<ComposeResult>>(&h.app, "POST", "/api/problems/example1/compose", body).await;
    assert!(solved.result.pareto.find(&["W1", "D2", "O5"]).is_some_and(|d| d.quality.to_string() == "(1;3,0,0)"));
}

#[tokio::test]
async fn bad_solve_requests_are_400() {
    let h = seeded().await;
    for (uri, body) in [
        ("/api/problems/example1/compose", "{\"scenario\":\"nope\"}"),
        ("/api/problems/example1/compose", "{\"node\":\"Q\"}"),
        ("/api/problems/example1/compose", "{\"colour\":1}"),
        ("/api/problems/example1/compose", "not json"),
        ("/api/problems/example1/knapsack", ""),
        ("/api/problems/example2/knapsack", "{\"budget\":40}"),
        ("/api/problems/example3/trajectory", ""),
        ("/api/problems/example1/rank", "{\"config\":{\"max_layers\":0}}"),
    ] {
        let (status, err) = call_json::<ErrorBody>(&h.app, "POST", uri, body.to_string()).await;
        assert_eq!((status, err.error), (StatusCode::BAD_REQUEST, FailureClass::BadRequest), "{uri} {body}");
    }
}

fn zero_block(doc: &mut ProblemDocument) {
    let wo = doc.compatibility.iter_mut().find(|m| m.part_a == "W" && m.part_b == "O").unwrap();
    wo.values.iter_mut().flatten().for_each(|v| *v = 0);
}

#[tokio::test]
async fn infeasible_is_422_with_zero_pairs() {
    let h = harness();
    let mut doc = fixtures::example1();
    zero_block(&mut doc);
    let (status, _) = call(&h.app, "POST", "/api/problems?id=blocked", doc.to_json()).await;
    assert_eq!(status, StatusCode::CREATED);
    let (status, err) = call_json::<ErrorBody>(&h.app, "POST", "/api/problems/blocked/compose", String::new()).await;
    assert_eq!((status, err.error), (StatusCode::UNPROCESSABLE_ENTITY, FailureClass::Infeasible));
    let details = err.details.unwrap();
    assert_eq!(details["node"], "B");
    let pairs = details["zero_pairs"].as_array().unwrap();
    assert!(pairs.len() >= 25, "every W-O pair is zero: {}", pairs.len());
    assert!(pairs.iter().all(|p| p["value"] == 0));

    let (status, err) = call_json::<ErrorBody>(&h.app, "POST", "/api/problems/blocked/knapsack", "{\"budget\":3}".to_string()).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(err.details.unwrap()["minimum"], 6);
}

#[tokio::test]
async fn knapsack_selections_by_budget() {
    let h = seeded().await;
    for (budget, label) in [(15, "M1 E2 W1 D2 O3"), (18, "M2 E2 W1 D2 O3"), (19, "M3 E2 W1 D2 O3")] {
        let body = json!({ "budget": budget }).to_string();
        let (status, solved) = call_json::<Solved<KnapsackResult>>(&h.app, "POST", "/api/problems/example1/knapsack", body).await;
        assert_eq!(status, StatusCode::OK);
        assert_eq!(solved.result.selection.label(), label);
        assert_eq!(solved.result.selection.total_cost, budget);
        assert_eq!(solved.result.ordering.entries.len(), 20);
    }
    let body = json!({ "budget": 19, "solver": "greedy" }).to_string();
    let (status, solved) = call_json::<Solved<KnapsackResult>>(&h.app, "POST", "/api/problems/example1/knapsack", body).await;
    assert_eq!(status, StatusCode::OK);
    assert!(solved.result.selection.total_cost <= 19);
}

#[tokio::test]
async fn rank_and_trajectory() {
    let h = seeded().await;
    let body = json!({ "scenario": "provider", "config": { "method": "external" } }).to_string();
    let (status, solved) = call_json::<Solved<RankResult>>(&h.app, "POST", "/api/problems/example1/rank", body).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(&solved.result.leaves["W"], fixtures::example1().priorities("provider").unwrap().get("W").unwrap());

    let (status, solved) = call_json::<Solved<TrajectoryResult>>(&h.app, "POST", "/api/problems/example1/trajectory", None).await;
    assert_eq!(status, StatusCode::OK);
    let alpha = ["M2*E2*W2*D2*O2", "M3*E2*W5*D1*O3", "M3*E2*W2*D2*O2"];
    assert!(solved.result.trajectories.iter().any(|t| t.labels() == alpha));
}

/// Independent recomputation: edit a copy of the model and compose again.
fn recompose_with(doc: &ProblemDocument, pair: (&str, &str, &str, &str), value: u32) -> ParetoSet {
    let mut model = doc.to_model();
    model.set_compatibility(pair.0, pair.1, pair.2, pair.3, value).unwrap();
    compose_part(&model, "B", doc.priorities("provider").unwrap()).unwrap()
}

#[tokio::test]
async fn whatif_reports_delta_without_writing() {
    let h = seeded().await;
    let before_file = std::fs::read(h.store.dir().join("example1.json")).unwrap();
    let body = json!({
        "scenario": "provider",
        "overrides": { "compat": [{ "part_a": "D", "alternative_a": "D2", "part_b": "O", "alternative_b": "O5", "value": 3 }] }
    })
    .to_string();
    let (status, solved) = call_json::<Solved<WhatIfDelta>>(&h.app, "POST", "/api/problems/example1/whatif", body).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(solved.revision, 1);
    let delta = &solved.result;
    assert_eq!(delta.node, "B");

    let doc = fixtures::example1();
    let oracle = recompose_with(&doc, ("D", "D2", "O", "O5"), 3);
    let summary = |set: &ParetoSet| set.decisions.iter().map(|d| (d.label(), d.quality.to_string())).collect::<Vec<_>>();
    assert_eq!(summary(&delta.after), summary(&oracle));
    assert_eq!(oracle.find(&["W1", "D2", "O5"]).unwrap().quality.to_string(), "(3;3,0,0)");
    let promoted = delta.changed.iter().find(|c| c.choice.values().eq(["W1", "D2", "O5"].iter())).expect("W1*D2*O5 changed");
    assert_eq!((promoted.before.to_string(), promoted.after.to_string()), ("(1;3,0,0)".into(), "(3;3,0,0)".into()));
    let oracle_labels: Vec<String> = oracle.decisions.iter().map(|d| d.label()).collect();
    let left: Vec<String> = delta.left.iter().map(|d| d.label()).collect();
    let before_labels: Vec<String> = delta.before.decisions.iter().map(|d| d.label()).filter(|l| !oracle_labels.contains(l)).collect();
    assert_eq!(left, before_labels);

    let (_, stored) = call_json::<StoredProblem>(&h.app, "GET", "/api/problems/example1", None).await;
    assert_eq!((stored.revision, stored.document), (1, doc));
    assert_eq!(std::fs::read(h.store.dir().join("example1.json")).unwrap(), before_file);
}

#[tokio::test]
async fn whatif_same_value_is_empty() {
    let h = seeded().await;
    let body = json!({
        "scenario": "provider",
        "overrides": { "compat": [{ "part_a": "D", "alternative_a": "D2", "part_b": "O", "alternative_b": "O5", "value": 1 }] }
    })
    .to_string();
    let (_, solved) = call_json::<Solved<Value>>(&h.app, "POST", "/api/problems/example1/whatif", body).await;
    for key in ["entered", "left", "changed"] {
        assert_eq!(solved.result[key], json!([]), "{key}");
    }
    let body = json!({ "overrides": { "compat": [{ "part_a": "D", "alternative_a": "D2", "part_b": "O", "alternative_b": "O5", "value": 4 }] } }).to_string();
    let (status, _) = call(&h.app, "POST", "/api/problems/example1/whatif", body).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn solve_endpoints_do_not_write() {
    let h = seeded().await;
    for (uri, body) in [
        ("/api/problems/example1/rank", ""),
        ("/api/problems/example1/compose", ""),
        ("/api/problems/example1/knapsack", "{\"budget\":19}"),
        ("/api/problems/example1/trajectory", ""),
    ] {
        let (status, _) = call(&h.app, "POST", uri, body.to_string()).await;
        assert_eq!(status, StatusCode::OK, "{uri}");
    }
    let list = h.store.list();
    assert!(list.iter().all(|p| p.revision == 1));
}

#[tokio::test]
async fn root_serves_placeholder_or_assets() {
    let h = harness();
    let (status, body) = call(&h.app, "GET", "/", None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(String::from_utf8(body).unwrap().contains("/api/problems"));

    let ui = tempfile::tempdir().unwrap();
    std::fs::write(ui.path().join("index.html"), "<p>workbench</p>").unwrap();
    let app = router(h.store.clone(), Some(ui.path().to_path_buf()));
    let (status, body) = call(&app, "GET", "/", None).await;
    assert_eq!((status, body.as_slice()), (StatusCode::OK, b"<p>workbench</p>".as_slice()));
    let (status, _) = call(&app, "GET", "/api/problems", None).await;
    assert_eq!(status, StatusCode::OK);
}
