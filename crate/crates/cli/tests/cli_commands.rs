mod support;

use std::fs;

use greybox_cli::exit;
use greybox_core::problem_model::{has_errors, parse_spec, validate_spec};
use support::{drive_cli, greybox, ok, walkthrough};

fn code(output: &std::process::Output) -> i32 {
    output.status.code().expect("exited normally")
}

#[test]
fn new_session_writes_the_requested_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.session");
    let out = ok(greybox(
        dir.path(),
        &[
            "intake",
            "new",
            "--participants",
            "A:client,B:optimizer",
            "--out",
            path.to_str().unwrap(),
        ],
    ));
    assert!(path.exists());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("next: item2"), "{stdout}");

    // A second `new` to the same file is refused.
    let again = greybox(
        dir.path(),
        &[
            "intake",
            "new",
            "--participants",
            "A:client",
            "--out",
            path.to_str().unwrap(),
        ],
    );
    assert_eq!(code(&again), i32::from(exit::REJECTED));
}

#[test]
fn finalize_with_pending_budget_reports_incomplete() {
    let dir = tempfile::tempdir().unwrap();
    let w = walkthrough();
    ok(greybox(
        dir.path(),
        &["intake", "new", "--participants", &w.participants, "--id", &w.id],
    ));
    for step in w.steps.iter().filter(|s| s.instance != "item9") {
        let args: Vec<String> = match (&step.answer, &step.skip) {
            (Some(a), _) => vec!["--answer".into(), a.to_string()],
            (None, Some(r)) => vec!["--reason".into(), r.clone()],
            _ => unreachable!(),
        };
        let verb = if step.answer.is_some() { "answer" } else { "skip" };
        let mut full = vec!["intake", verb, &w.id, "--instance", &step.instance];
        full.extend(args.iter().map(String::as_str));
        ok(greybox(dir.path(), &full));
    }
    let out = greybox(dir.path(), &["intake", "finalize", &w.id]);
    assert_eq!(code(&out), i32::from(exit::INCOMPLETE));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("item9"), "{stderr}");

    let export = greybox(dir.path(), &["intake", "export", &w.id]);
    assert_eq!(code(&export), i32::from(exit::UNFINALIZED));
}

#[test]
fn scripted_walkthrough_exports_a_clean_spec() {
    let dir = tempfile::tempdir().unwrap();
    let files = drive_cli(dir.path());
    let spec = parse_spec(&files.spec).unwrap();
    assert!(!has_errors(&validate_spec(&spec)));

    let exported = dir.path().join("exported.json");
    ok(greybox(
        dir.path(),
        &["intake", "export", "reactor", "--out", exported.to_str().unwrap()],
    ));
    assert_eq!(fs::read(&exported).unwrap(), files.spec);

    let validate = ok(greybox(
        dir.path(),
        &["validate", exported.to_str().unwrap(), "--format", "json"],
    ));
    let findings: serde_json::Value = serde_json::from_slice(&validate.stdout).unwrap();
    assert!(findings.as_array().unwrap().iter().all(|f| f["severity"] != "error"));

    let rec = ok(greybox(
        dir.path(),
        &["recommend", exported.to_str().unwrap(), "--format", "md"],
    ));
    let text = String::from_utf8(rec.stdout).unwrap();
    assert!(text.starts_with("| rank | family | score | trace |"), "{text}");
    assert!(text.contains("multi_objective"), "{text}");
}

#[test]
fn invalid_spec_fails_validation_with_findings_on_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let files = drive_cli(dir.path());
    let mut spec = parse_spec(&files.spec).unwrap();
    spec.variables[0].lower = Some(900.0);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, greybox_core::problem_model::write_spec(&spec)).unwrap();
    let out = greybox(dir.path(), &["validate", bad.to_str().unwrap()]);
    assert_eq!(code(&out), i32::from(exit::VALIDATION));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("INVALID_BOUNDS"), "{stdout}");
}

#[test]
fn malformed_and_future_documents_have_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    let truncated = dir.path().join("t.json");
    fs::write(&truncated, "{\"schema_version\": 1, \"goal\": ").unwrap();
    assert_eq!(
        code(&greybox(dir.path(), &["validate", truncated.to_str().unwrap()])),
        i32::from(exit::PARSE)
    );

    let future = dir.path().join("f.json");
    fs::write(&future, "{\"schema_version\": 7}").unwrap();
    assert_eq!(
        code(&greybox(dir.path(), &["validate", future.to_str().unwrap()])),
        i32::from(exit::VERSION)
    );

    let missing = dir.path().join("missing.json");
    assert_eq!(
        code(&greybox(dir.path(), &["validate", missing.to_str().unwrap()])),
        i32::from(exit::IO)
    );

    assert_eq!(code(&greybox(dir.path(), &["intake", "bogus"])), i32::from(exit::USAGE));
}

#[test]
fn engine_rejections_exit_with_rejected() {
    let dir = tempfile::tempdir().unwrap();
    ok(greybox(
        dir.path(),
        &["intake", "new", "--participants", "A:client", "--id", "s1"],
    ));
    let skip = greybox(
        dir.path(),
        &[
            "intake",
            "skip",
            "s1",
            "--instance",
            "item8",
            "--reason",
            "ran out of time",
        ],
    );
    assert_eq!(code(&skip), i32::from(exit::REJECTED));
    assert!(String::from_utf8(skip.stderr).unwrap().contains("required"));

    let wrong = greybox(
        dir.path(),
        &[
            "intake",
            "answer",
            "s1",
            "--instance",
            "item2",
            "--answer",
            r#"{"kind":"known","value":true}"#,
        ],
    );
    assert_eq!(code(&wrong), i32::from(exit::REJECTED));

    let stale = greybox(
        dir.path(),
        &[
            "intake",
            "answer",
            "s1",
            "--instance",
            "item2",
            "--revision",
            "5",
            "--answer",
            r#"{"kind":"goal_kind","value":"find_best"}"#,
        ],
    );
    assert_eq!(code(&stale), i32::from(exit::REJECTED));

    let garbled = greybox(
        dir.path(),
        &["intake", "answer", "s1", "--instance", "item2", "--answer", "{"],
    );
    assert_eq!(code(&garbled), i32::from(exit::PARSE));
}

#[test]
fn resume_reports_progress_as_json() {
    let dir = tempfile::tempdir().unwrap();
    ok(greybox(
        dir.path(),
        &["intake", "new", "--participants", "A:client", "--id", "s2"],
    ));
    let out = ok(greybox(dir.path(), &["intake", "resume", "s2", "--format", "json"]));
    let status: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(status["revision"], 1);
    assert_eq!(status["next"]["status"], "item");
    assert_eq!(status["next"]["id"], "item2");
    assert_eq!(status["progress"]["pending"], 9);

    let jumped = ok(greybox(dir.path(), &["intake", "resume", "s2", "--jump", "item5"]));
    assert!(String::from_utf8(jumped.stdout).unwrap().contains("next: item5"));
}

#[test]
fn template_command_prints_the_shipped_template() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(greybox(dir.path(), &["template"]));
    let template: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(template["items"].as_array().unwrap().len(), 10);
}
