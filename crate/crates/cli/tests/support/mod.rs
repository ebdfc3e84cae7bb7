//! Drives the fixture walkthrough through the CLI binary and the HTTP
//! router.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use greybox_cli::http::router;
use greybox_core::checklist::Engine;
use http_body_util::BodyExt;
use serde::Deserialize;
use serde_json::{json, Value};
use tower::ServiceExt;

pub const WALKTHROUGH: &str = include_str!("../fixtures/walkthrough.json");

#[derive(Debug, Deserialize)]
pub struct Walkthrough {
    pub id: String,
    pub now: String,
    pub participants: String,
    pub steps: Vec<Step>,
}

#[derive(Debug, Deserialize)]
pub struct Step {
    pub instance: String,
    #[serde(default)]
    pub answer: Option<Value>,
    #[serde(default)]
    pub skip: Option<String>,
}

pub fn walkthrough() -> Walkthrough {
    serde_json::from_str(WALKTHROUGH).expect("fixture parses")
}

pub fn greybox(data_dir: &Path, args: &[&str]) -> Output {
    let w = walkthrough();
    Command::new(env!("CARGO_BIN_EXE_greybox"))
        .args(args)
        .env("GREYBOX_DATA_DIR", data_dir)
        .env("GREYBOX_NOW", &w.now)
        .output()
        .expect("binary runs")
}

pub fn ok(output: Output) -> Output {
    assert!(
        output.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
    output
}

pub struct Persisted {
    pub session: Vec<u8>,
    pub spec: Vec<u8>,
    pub session_path: PathBuf,
    pub spec_path: PathBuf,
}

fn persisted(data_dir: &Path, id: &str) -> Persisted {
    let session_path = data_dir.join(format!("{id}.session"));
    let spec_path = data_dir.join(format!("{id}.spec.json"));
    Persisted {
        session: std::fs::read(&session_path).expect("session file"),
        spec: std::fs::read(&spec_path).expect("spec file"),
        session_path,
        spec_path,
    }
}

/// Runs every step with `greybox intake ...` and finalizes.
pub fn drive_cli(data_dir: &Path) -> Persisted {
    let w = walkthrough();
    ok(greybox(
        data_dir,
        &["intake", "new", "--participants", &w.participants, "--id", &w.id],
    ));
    for step in &w.steps {
        match (&step.answer, &step.skip) {
            (Some(answer), _) => {
                let answer = answer.to_string();
                ok(greybox(
                    data_dir,
                    &[
                        "intake",
                        "answer",
                        &w.id,
                        "--instance",
                        &step.instance,
                        "--answer",
                        &answer,
                    ],
                ));
            }
            (None, Some(reason)) => {
                ok(greybox(
                    data_dir,
                    &[
                        "intake",
                        "skip",
                        &w.id,
                        "--instance",
                        &step.instance,
                        "--reason",
                        reason,
                    ],
                ));
            }
            (None, None) => panic!("step {} has neither answer nor skip", step.instance),
        }
    }
    ok(greybox(data_dir, &["intake", "finalize", &w.id]));
    persisted(data_dir, &w.id)
}

pub fn fixed_engine() -> Engine {
    let w = walkthrough();
    let at = chrono::DateTime::parse_from_rfc3339(&w.now).unwrap().to_utc();
    Engine::default().with_fixed_time(at)
}

pub async fn call(app: &axum::Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value, Vec<u8>) {
    let request = Request::builder().method(method).uri(uri);
    let request = match body {
        Some(b) => request
            .header("content-type", "application/json")
            .body(Body::from(b.to_string()))
            .unwrap(),
        None => request.body(Body::empty()).unwrap(),
    };
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes().to_vec();
    let value = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    (status, value, bytes)
}

/// Runs every step against the HTTP router and finalizes.
pub async fn drive_http(data_dir: &Path) -> Persisted {
    let w = walkthrough();
    let app = router(fixed_engine(), data_dir);
    let participants: Vec<Value> = w
        .participants
        .split(',')
        .map(|p| {
            let (name, role) = p.split_once(':').unwrap();
            json!({"name": name, "role": role})
        })
        .collect();
    let (status, body, _) = call(
        &app,
        "POST",
        "/sessions",
        Some(json!({"participants": participants, "id": w.id})),
    )
    .await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    let mut revision = body["revision"].as_u64().unwrap();
    for step in &w.steps {
        let (uri, payload) = match (&step.answer, &step.skip) {
            (Some(answer), _) => (
                "answers",
                json!({"revision": revision, "instance": step.instance, "answer": answer}),
            ),
            (None, Some(reason)) => (
                "skips",
                json!({"revision": revision, "instance": step.instance, "reason": reason}),
            ),
            (None, None) => panic!("step {} has neither answer nor skip", step.instance),
        };
        let (status, body, _) = call(&app, "POST", &format!("/sessions/{}/{uri}", w.id), Some(payload)).await;
        assert_eq!(status, StatusCode::OK, "{}: {body}", step.instance);
        revision = body["revision"].as_u64().unwrap();
    }
    let (status, body, _) = call(
        &app,
        "POST",
        &format!("/sessions/{}/finalize", w.id),
        Some(json!({"revision": revision})),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{body}");
    persisted(data_dir, &w.id)
}
