use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;
use wasa_core::{solve_evaluate, DampingFactor};
use wasa_service::document::{serialize_graph, GraphDocument};
use wasa_service::eval::{evaluate_graph, EvalRequest};
use wasa_service::fixtures::fixture;
use wasa_service::server::{router, AppState};
use wasa_service::store::Store;

fn app() -> Router {
    router(AppState::new(Store::in_memory()))
}

async fn call(
    app: &Router,
    method: Method,
    uri: &str,
    body: impl Into<String>,
) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(Body::from(body.into()))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let v = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap()
    };
    (status, v)
}

async fn store_fixture(app: &Router, name: &str) -> String {
    let (s, v) = call(
        app,
        Method::POST,
        "/graphs",
        serialize_graph(&fixture(name).unwrap()),
    )
    .await;
    assert_eq!(s, StatusCode::CREATED, "{v}");
    v["id"].as_str().unwrap().to_string()
}

fn dir_request(d: f64) -> Value {
    json!({"semantics": "dir", "damping": {"policy": "global", "value": d}})
}

fn degrees(v: &Value) -> Vec<(String, f64)> {
    v["degrees"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            (
                e["id"].as_str().unwrap().to_string(),
                e["degree"].as_f64().unwrap(),
            )
        })
        .collect()
}

fn degree(v: &Value, id: &str) -> f64 {
    degrees(v).into_iter().find(|(i, _)| i == id).unwrap().1
}

#[tokio::test]
async fn post_is_idempotent_and_get_returns_document() {
    let app = app();
    let id = store_fixture(&app, "liverpool").await;
    let (s, v) = call(
        &app,
        Method::POST,
        "/graphs",
        serialize_graph(&fixture("liverpool").unwrap()),
    )
    .await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["id"], id.as_str());
    let (s, v) = call(&app, Method::GET, &format!("/graphs/{id}"), "").await;
    assert_eq!(s, StatusCode::OK);
    let doc: GraphDocument = serde_json::from_value(v).unwrap();
    assert_eq!(doc, fixture("liverpool").unwrap());
}

#[tokio::test]
async fn unknown_graph_is_not_found() {
    let (s, v) = call(&app(), Method::GET, "/graphs/deadbeef", "").await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(v["code"], "NotFound");
}

#[tokio::test]
async fn evaluate_matches_library_bit_for_bit() {
    let app = app();
    let id = store_fixture(&app, "liverpool").await;
    let (s, v) = call(
        &app,
        Method::POST,
        &format!("/graphs/{id}/evaluate"),
        dir_request(2.0).to_string(),
    )
    .await;
    assert_eq!(s, StatusCode::OK, "{v}");
    let g = fixture("liverpool").unwrap().to_graph().unwrap();
    let lib = solve_evaluate(&g, &DampingFactor::global(2.0).unwrap())
        .unwrap()
        .degrees;
    let got: Vec<f64> = degrees(&v).into_iter().map(|(_, d)| d).collect();
    assert_eq!(
        got.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
        lib.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
    );
    assert_eq!(degree(&v, "lpl"), 6.0);
}

#[tokio::test]
async fn school_weight_patch_follows_propagation_column() {
    let app = app();
    let id = store_fixture(&app, "school").await;
    let body = json!({"weights": {"Alice": 2.5}, "request": dir_request(3.0)});
    let (s, v) = call(
        &app,
        Method::PATCH,
        &format!("/graphs/{id}/weights"),
        body.to_string(),
    )
    .await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(v["document"]["arguments"][2]["weight"], 2.5);
    // Oracle: solve with the new weight vector.
    let mut doc = fixture("school").unwrap();
    doc.arguments[2].weight = 2.5;
    let fresh = solve_evaluate(
        &doc.to_graph().unwrap(),
        &DampingFactor::global(3.0).unwrap(),
    )
    .unwrap();
    let got: Vec<f64> = degrees(&v["evaluation"])
        .into_iter()
        .map(|(_, d)| d)
        .collect();
    assert_eq!(got, fresh.degrees);
    // Shift of 1.5 times Alice's column (1, −8, 25, −11)/21 on (7, 5.5, 2.5, 2.5).
    let expect = [
        7.0 + 1.5 / 21.0,
        5.5 - 12.0 / 21.0,
        2.5 + 37.5 / 21.0,
        2.5 - 16.5 / 21.0,
    ];
    for (g, e) in got.iter().zip(expect) {
        assert!((g - e).abs() < 1e-9, "{got:?}");
    }
    let (_, stored) = call(&app, Method::GET, &format!("/graphs/{id}"), "").await;
    assert_eq!(stored, v["document"]);
}

#[tokio::test]
async fn removing_the_injury_attack_restores_wlm() {
    let app = app();
    let id = store_fixture(&app, "liverpool").await;
    let body = json!({"op": "remove", "from": "bpi", "to": "wlm", "request": dir_request(2.0)});
    let (s, v) = call(
        &app,
        Method::PATCH,
        &format!("/graphs/{id}/edges"),
        body.to_string(),
    )
    .await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(degree(&v["evaluation"], "wlm"), 5.0);
    assert_eq!(v["document"]["edges"].as_array().unwrap().len(), 2);
}

#[tokio::test]
async fn edge_flip_and_add() {
    let app = app();
    let id = store_fixture(&app, "neutralisation").await;
    let uri = format!("/graphs/{id}/edges");
    let body = json!({"op": "flip", "from": "a1", "to": "a2", "request": dir_request(2.0)});
    let (s, v) = call(&app, Method::PATCH, &uri, body.to_string()).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    // Two supporters of weight 4 at d = 2.
    assert_eq!(degree(&v["evaluation"], "a2"), 7.0);
    let body = json!({"op": "add", "from": "a2", "to": "a3", "polarity": "attack", "request": dir_request(2.0)});
    let (s, v) = call(&app, Method::PATCH, &uri, body.to_string()).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    // a3 = 4 − a2/2 and a2 = 5 + a3/2.
    assert!((degree(&v["evaluation"], "a3") - 1.2).abs() < 1e-12);
    assert!((degree(&v["evaluation"], "a2") - 5.6).abs() < 1e-12);
    let (s, v) = call(
        &app,
        Method::PATCH,
        &uri,
        json!({"op": "add", "from": "a1", "to": "a3"}).to_string(),
    )
    .await;
    assert_eq!(
        (s, v["path"].as_str()),
        (StatusCode::UNPROCESSABLE_ENTITY, Some("polarity"))
    );
    let (s, v) = call(
        &app,
        Method::PATCH,
        &uri,
        json!({"op": "remove", "from": "a3", "to": "a1"}).to_string(),
    )
    .await;
    assert_eq!(
        (s, v["code"].as_str()),
        (StatusCode::UNPROCESSABLE_ENTITY, Some("ValidationError"))
    );
}

#[tokio::test]
async fn unknown_weight_target_has_path() {
    let app = app();
    let id = store_fixture(&app, "school").await;
    let body = json!({"weights": {"Carol": 1.0}});
    let (s, v) = call(
        &app,
        Method::PATCH,
        &format!("/graphs/{id}/weights"),
        body.to_string(),
    )
    .await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["path"], "weights.Carol");
}

#[tokio::test]
async fn sdir_rejects_boundary_weight() {
    let app = app();
    let id = store_fixture(&app, "neutrality").await;
    let (s, v) = call(
        &app,
        Method::POST,
        &format!("/graphs/{id}/evaluate"),
        r#"{"semantics":"sdir"}"#,
    )
    .await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["code"], "EvaluationError");
    assert_eq!(v["detail"]["kind"], "WeightOnBoundary");
}

#[tokio::test]
async fn domain_errors_leave_patched_graph_untouched() {
    let app = app();
    let id = store_fixture(&app, "rsig-square").await;
    let body = json!({"weights": {"a": 1.5}, "request": {"semantics": "rsig"}});
    let (s, v) = call(
        &app,
        Method::PATCH,
        &format!("/graphs/{id}/weights"),
        body.to_string(),
    )
    .await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["detail"]["kind"], "WeightOutOfClosedUnit");
    let (_, stored) = call(&app, Method::GET, &format!("/graphs/{id}"), "").await;
    assert_eq!(stored["arguments"][0]["weight"], 0.75);
}

#[tokio::test]
async fn non_convergence_carries_classification() {
    let app = app();
    let id = store_fixture(&app, "self-attack").await;
    let (s, v) = call(
        &app,
        Method::POST,
        &format!("/graphs/{id}/evaluate"),
        dir_request(1.0).to_string(),
    )
    .await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["code"], "EvaluationError");
    assert_eq!(v["detail"]["status"], "oscillating");
    assert_eq!(v["detail"]["period"], 2);
    let id = store_fixture(&app, "rsig-square").await;
    let (_, v) = call(
        &app,
        Method::POST,
        &format!("/graphs/{id}/evaluate"),
        r#"{"semantics":"rsig"}"#,
    )
    .await;
    assert_eq!(v["detail"]["states"][1][0]["degree"], 0.5);
}

#[tokio::test]
async fn what_if_loop_survives_oscillation() {
    let app = app();
    let id = store_fixture(&app, "self-attack").await;
    let body = json!({"weights": {"a": 2.0}, "request": dir_request(1.0)});
    let (s, v) = call(
        &app,
        Method::PATCH,
        &format!("/graphs/{id}/weights"),
        body.to_string(),
    )
    .await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["evaluation"]["status"], "oscillating");
    assert!(v["evaluation"].get("degrees").is_none());
}

#[tokio::test]
async fn validation_errors_are_structured() {
    let app = app();
    let mut doc = serde_json::to_value(fixture("liverpool").unwrap()).unwrap();
    doc["edges"][1]["polarity"] = json!("suport");
    let (s, v) = call(&app, Method::POST, "/graphs", doc.to_string()).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(
        (v["code"].as_str(), v["path"].as_str()),
        (Some("ValidationError"), Some("edges[1].polarity"))
    );
    let (s, v) = call(&app, Method::POST, "/graphs", "{\"version\": ").await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["detail"]["line"], 1);
    let inline = json!({"graph": doc, "request": dir_request(2.0)});
    let (s, v) = call(&app, Method::POST, "/evaluate", inline.to_string()).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["path"], "graph.edges[1].polarity");
}

#[tokio::test]
async fn inline_and_stored_evaluation_agree() {
    let app = app();
    let id = store_fixture(&app, "arggraph").await;
    let inline = json!({"graph": fixture("arggraph").unwrap(), "request": dir_request(4.0)});
    let (s, a) = call(&app, Method::POST, "/evaluate", inline.to_string()).await;
    assert_eq!(s, StatusCode::OK, "{a}");
    let by_id = json!({"graph": id, "request": dir_request(4.0)});
    let (_, b) = call(&app, Method::POST, "/evaluate", by_id.to_string()).await;
    assert_eq!(a, b);
    let g = fixture("arggraph").unwrap().to_graph().unwrap();
    let req = EvalRequest {
        damping: wasa_core::Damping::Global(4.0),
        ..EvalRequest::default()
    };
    assert_eq!(
        a,
        serde_json::to_value(evaluate_graph(&g, &req).unwrap()).unwrap()
    );
}

#[tokio::test]
async fn patch_then_evaluate_equals_fresh_submission() {
    let app = app();
    let id = store_fixture(&app, "interchangeability").await;
    let body = json!({"weights": {"a1": 0.75, "a4": 0.1}, "request": dir_request(2.0)});
    let (_, patched) = call(
        &app,
        Method::PATCH,
        &format!("/graphs/{id}/weights"),
        body.to_string(),
    )
    .await;
    let fresh = json!({"graph": patched["document"], "request": dir_request(2.0)});
    let (_, v) = call(&app, Method::POST, "/evaluate", fresh.to_string()).await;
    assert_eq!(v, patched["evaluation"]);
}

#[tokio::test]
async fn put_replaces_document() {
    let app = app();
    let id = store_fixture(&app, "neutrality").await;
    let prime = serialize_graph(&fixture("neutrality-prime").unwrap());
    let (s, _) = call(&app, Method::PUT, &format!("/graphs/{id}"), prime).await;
    assert_eq!(s, StatusCode::OK);
    let (_, v) = call(&app, Method::GET, &format!("/graphs/{id}"), "").await;
    assert_eq!(v["edges"], json!([]));
    let (s, _) = call(
        &app,
        Method::PUT,
        "/graphs/my-graph",
        serialize_graph(&fixture("school").unwrap()),
    )
    .await;
    assert_eq!(s, StatusCode::CREATED);
}

#[tokio::test]
async fn semantics_catalog() {
    let (s, v) = call(&app(), Method::GET, "/semantics", "").await;
    assert_eq!(s, StatusCode::OK);
    let rows: Vec<(String, String, f64)> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            (
                e["tag"].as_str().unwrap().to_string(),
                e["weight_range"].as_str().unwrap().to_string(),
                e["neutral_value"].as_f64().unwrap(),
            )
        })
        .collect();
    let expect = [
        ("dir", "R", 0.0),
        ("sdir", "(0,1)", 0.5),
        ("rsig", "[0,1]", 0.0),
        ("rdamped", "[0,1]", 0.0),
        ("dogged", "[0,1]", 0.0),
    ];
    assert_eq!(rows.len(), 5);
    for (r, e) in rows.iter().zip(expect) {
        assert_eq!((r.0.as_str(), r.1.as_str(), r.2), e);
    }
}

#[tokio::test]
async fn fixtures_are_served() {
    let app = app();
    let (_, names) = call(&app, Method::GET, "/fixtures", "").await;
    assert_eq!(names.as_array().unwrap().len(), 15);
    let (s, doc) = call(&app, Method::GET, "/fixtures/dogged-hexagon", "").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(doc["edges"].as_array().unwrap().len(), 26);
}

#[tokio::test]
async fn store_survives_restart() {
    let dir = tempfile::tempdir().unwrap();
    let id = {
        let app = router(AppState::new(Store::open(dir.path()).unwrap()));
        let id = store_fixture(&app, "dampening").await;
        let body = json!({"weights": {"a4": 3.0}});
        let (s, _) = call(
            &app,
            Method::PATCH,
            &format!("/graphs/{id}/weights"),
            body.to_string(),
        )
        .await;
        assert_eq!(s, StatusCode::OK);
        id
    };
    let app = router(AppState::new(Store::open(dir.path()).unwrap()));
    let (s, v) = call(&app, Method::GET, &format!("/graphs/{id}"), "").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["arguments"][3]["weight"], 3.0);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_patches_are_not_lost() {
    let app = app();
    let id = store_fixture(&app, "dogged-hexagon").await;
    let mut tasks = Vec::new();
    for (k, arg) in ["a", "b", "c", "d", "e", "f"].into_iter().enumerate() {
        let app = app.clone();
        let uri = format!("/graphs/{id}/weights");
        let w = 0.1 * (k + 1) as f64;
        tasks.push(tokio::spawn(async move {
            let body = json!({"weights": {arg: w}, "request": {"semantics": "rsig"}});
            call(&app, Method::PATCH, &uri, body.to_string()).await.0
        }));
    }
    for t in tasks {
        assert_eq!(t.await.unwrap(), StatusCode::OK);
    }
    let (_, v) = call(&app, Method::GET, &format!("/graphs/{id}"), "").await;
    for k in 0..6 {
        assert_eq!(
            v["arguments"][k]["weight"].as_f64().unwrap(),
            0.1 * (k + 1) as f64
        );
    }
}

#[tokio::test]
async fn cli_and_service_agree() {
    let app = app();
    let id = store_fixture(&app, "school").await;
    let (_, v) = call(
        &app,
        Method::POST,
        &format!("/graphs/{id}/evaluate"),
        dir_request(3.0).to_string(),
    )
    .await;
    let o = std::process::Command::new(env!("CARGO_BIN_EXE_wasa"))
        .args([
            "eval",
            "--graph",
            "school",
            "--semantics",
            "dir",
            "--damping",
            "3",
            "--format",
            "records",
        ])
        .output()
        .unwrap();
    let cli: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(cli, v);
}
