use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pivotfan"))
}

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pivotfan-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn arb_on_the_triangle() {
    let tri = data("triangle.json");
    let out = run(&["arb", &tri, "--omega", "1,0"]);
    assert!(out.status.success());
    assert_eq!(
        json(&out),
        serde_json::json!({"1": "2", "2": "3", "3": "3"})
    );
    let out = run(&["arb", &tri, "--omega", "0,1"]);
    assert_eq!(
        json(&out),
        serde_json::json!({"1": "3", "2": "3", "3": "3"})
    );
    let out = run(&["arb", &tri, "--omega", "-1/2,3"]);
    assert!(out.status.success());
}

#[test]
fn arb_exit_codes() {
    let tri = data("triangle.json");
    let tie = run(&["arb", &tri, "--omega", "1,2"]);
    assert_eq!(tie.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&tie.stderr).contains("tie"));
    assert_eq!(
        run(&["arb", &tri, "--omega", "1,2,3"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["arb", &tri, "--omega", "x"]).status.code(), Some(2));
    assert_eq!(
        run(&["arb", &data("missing.json"), "--omega", "1,0"])
            .status
            .code(),
        Some(2)
    );
    let bad = scratch("bad.json");
    std::fs::write(
        &bad,
        r#"{"kind":"simplex","vertices":[["0","0"],["1","0"],["2","0"]],"c":["1","2"]}"#,
    )
    .unwrap();
    assert_eq!(
        run(&["arb", bad.to_str().unwrap(), "--omega", "1,0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn fan_counts() {
    for (args, count) in [
        (vec!["--simplex", "3"], 5),
        (vec!["--product", "1,1,1"], 6),
        (vec!["--product", "2,2"], 24),
    ] {
        let mut full = vec!["fan"];
        full.extend(&args);
        let out = run(&full);
        assert!(out.status.success(), "{args:?}");
        let report = json(&out);
        assert_eq!(report["command"], "fan");
        assert_eq!(report["results"]["count"], count, "{args:?}");
        assert_eq!(report["results"]["complete"], true);
    }
    let out = run(&["fan", "--simplex", "3", "--engine", "both"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["results"]["engines_agree"], true);
}

#[test]
fn class_counts() {
    for (blocks, count) in [("3", 5), ("1,2", 6), ("1,1,1", 6)] {
        let out = run(&["classes", "--blocks", blocks]);
        assert!(out.status.success());
        let report = json(&out);
        assert_eq!(report["results"]["count"], count);
        assert_eq!(
            report["results"]["classes"].as_array().unwrap().len(),
            count
        );
        assert!(report["instance_digest"].is_null());
    }
    assert_eq!(run(&["classes", "--blocks", "5,4"]).status.code(), Some(2));
    assert_eq!(run(&["classes", "--blocks", "0,2"]).status.code(), Some(2));
}

#[test]
fn verify_reports() {
    for (args, count) in [(vec!["--simplex", "3"], 5), (vec!["--product", "1,2"], 6)] {
        let mut full = vec!["verify", "--samples", "100"];
        full.extend(&args);
        let out = run(&full);
        assert!(out.status.success(), "{args:?}");
        let results = &json(&out)["results"];
        assert_eq!(results["pass"], true);
        assert_eq!(results["certificate"]["pivot_cones"], count);
        assert_eq!(results["certificate"]["classes"], count);
        assert_eq!(results["minkowski"]["distinct_vertices"], count);
    }
}

#[test]
fn mink_direction() {
    let out = run(&["mink", "--blocks", "2", "--omega", "1,2"]);
    assert!(out.status.success());
    assert_eq!(
        json(&out)["results"]["vertex"],
        serde_json::json!(["-1", "0"])
    );
    assert_eq!(
        run(&["mink", "--blocks", "2", "--omega", "1,1"])
            .status
            .code(),
        Some(1)
    );
    assert!(run(&["mink", "--blocks", "1,2"]).status.success());
}

#[test]
fn export_round_trips() {
    let inst = scratch("inst.json");
    let out = run(&[
        "gen",
        "--product",
        "2,1",
        "--seed",
        "4",
        "--out",
        inst.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let first = std::fs::read_to_string(&inst).unwrap();
    assert_eq!(stdout(&run(&["export", inst.to_str().unwrap()])), first);

    for (name, args) in [
        ("fan.json", vec!["fan", inst.to_str().unwrap()]),
        ("classes.json", vec!["classes", "--blocks", "2,2"]),
        (
            "verify.json",
            vec!["verify", inst.to_str().unwrap(), "--samples", "20"],
        ),
        ("mink.json", vec!["mink", "--blocks", "1,2"]),
    ] {
        let path = scratch(name);
        let mut full = args.clone();
        full.extend(["--out", path.to_str().unwrap()]);
        assert!(run(&full).status.success(), "{name}");
        let text = std::fs::read_to_string(&path).unwrap();
        let again = stdout(&run(&["export", path.to_str().unwrap()]));
        assert_eq!(again, text, "{name}");
    }
}

#[test]
fn export_normalizes_instances() {
    let path = scratch("loose.json");
    std::fs::write(
        &path,
        r#"{"kind":"simplex","vertices":[[0,1],[3,0],[0,0]],"c":["2/2","4/2"]}"#,
    )
    .unwrap();
    let out = run(&["export", path.to_str().unwrap()]);
    assert!(out.status.success());
    let inst = json(&out);
    assert_eq!(inst["c"], serde_json::json!(["1", "2"]));
    assert_eq!(inst["vertices"][0], serde_json::json!(["0", "0"]));
}

#[test]
fn instance_from_stdin() {
    use std::io::Write;
    let mut child = bin()
        .args(["arb", "-", "--omega", "1,0"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    let text = std::fs::read_to_string(data("triangle.json")).unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(text.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(json(&out)["1"], "2");
}
