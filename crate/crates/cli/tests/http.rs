//! The HTTP service answers with the same JSON as the command line.

use std::process::Command;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use counterbound_cli::server::router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn post(path: &str, body: &Value) -> (StatusCode, Value) {
    let req = Request::post(path)
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    let resp = router().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap())
}

fn cli(args: &[&str]) -> Value {
    let out = Command::new(env!("CARGO_BIN_EXE_counterbound"))
        .args(args)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn obs() -> Value {
    json!({"pxy": 0.108, "pxy_": 0.132, "px_y": 0.084, "px_y_": 0.676})
}

#[tokio::test]
async fn bounds_matches_cli() {
    let body = json!({
        "obs": obs(),
        "params": {"m_x": 0.4, "M_x": 0.6, "m_xp": 0.1, "M_xp": 0.3},
        "pn_ps": true
    });
    let (status, http) = post("/api/bounds", &body).await;
    assert_eq!(status, StatusCode::OK);
    let local = cli(&[
        "bounds",
        "--obs",
        "0.108,0.132,0.084,0.676",
        "--params",
        "0.4,0.6,0.1,0.3",
        "--pn-ps",
    ]);
    assert_eq!(http, local);
}

#[tokio::test]
async fn sweep_matches_cli() {
    let body = json!({
        "obs": obs(),
        "spec": {
            "target": "harm",
            "side": "upper",
            "axes": ["m_xp", "M_x"],
            "fixed": {"m_x": 0.4},
            "resolution": 9
        }
    });
    let (status, http) = post("/api/sweep", &body).await;
    assert_eq!(status, StatusCode::OK);
    let local = cli(&[
        "sweep", "--obs", "0.108,0.132,0.084,0.676", "--target", "harm", "--side", "upper",
        "--axes", "m_xp,M_x", "--fixed", "m_x=0.4", "--res", "9", "--format", "json",
    ]);
    assert_eq!(http, local);
    assert_eq!(http["cells"].as_array().unwrap().len(), 81);
}

#[tokio::test]
async fn social_and_simulate_match_cli() {
    let body = json!({
        "benefit": [0.3, 0.42], "harm": [0.0, 0.12], "ate": [0.28, 0.32],
        "weights": {"w_benefit": 2.0, "w_harm": 1.0}
    });
    let (_, http) = post("/api/social", &body).await;
    let local = cli(&[
        "social", "--benefit", "0.3,0.42", "--harm", "0,0.12", "--ate", "0.28,0.32", "--w", "2,1",
    ]);
    assert_eq!(http, local);

    let body = json!({"n": 2000, "seed": 5, "sampler": {"kind": "beta", "alpha": 0.5, "beta": 0.5}});
    let (status, http) = post("/api/simulate", &body).await;
    assert_eq!(status, StatusCode::OK);
    let local = cli(&["simulate", "--n", "2000", "--seed", "5", "--sampler", "beta:0.5,0.5"]);
    assert_eq!(http, local);
}

#[tokio::test]
async fn malformed_joint_is_400_with_code() {
    let body = json!({"joint": {
        "pxyv": 0.2, "pxyv_": 0.2, "pxy_v": 0.2, "pxy_v_": 0.2,
        "px_yv": 0.2, "px_yv_": 0.2, "px_y_v": 0.2, "px_y_v_": 0.2
    }});
    let (status, v) = post("/api/proxy", &body).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"], "NotNormalized");
    assert!(v["message"].as_str().unwrap().starts_with("NotNormalized"));
}

#[tokio::test]
async fn unknown_field_and_bad_json_are_400() {
    let (status, v) = post("/api/bounds", &json!({"obs": obs(), "extra": 1})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"], "InvalidJson");

    let (status, v) = post("/api/simulate", &json!({"n": 0, "seed": 1})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"], "InvalidParams");
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_requests_agree() {
    let body = json!({"n": 5000, "seed": 42});
    let tasks: Vec<_> = (0..8)
        .map(|_| {
            let body = body.clone();
            tokio::spawn(async move { post("/api/simulate", &body).await })
        })
        .collect();
    let mut results = Vec::new();
    for t in tasks {
        let (status, v) = t.await.unwrap();
        assert_eq!(status, StatusCode::OK);
        results.push(v);
    }
    assert!(results.windows(2).all(|w| w[0] == w[1]));
}
