use std::process::{Command, Output};

fn gbl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gbl"))
        .args(args)
        .output()
        .expect("gbl runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn analyze_l2_canonical_is_unconditional() {
    let out = gbl(&["analyze", "l2-canonical-4", "--budget", "300"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    for k in ["ksu", "cw", "ct", "cqg"] {
        assert_eq!(r["estimates"][k]["value"], 1.0, "{k}");
    }
    assert_eq!(r["verdict"]["status"], "proved-1-unconditional");
    assert_eq!(r["verdict"]["consistent"], true);
}

#[test]
fn analyze_shear_certifies() {
    let out = gbl(&["analyze", "shear-2", "--budget", "300"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let k = 5f64.sqrt() / 2.0;
    assert_eq!(r["estimates"]["ksu"]["exactness"], "exact");
    assert!((r["estimates"]["ksu"]["value"].as_f64().unwrap() - k).abs() < 1e-9);
    assert!((r["certificates"][0]["ratio"].as_f64().unwrap() - k).abs() < 1e-9);
    assert_eq!(r["instance"]["name"], "shear-2");
    assert_eq!(r["instance"]["digest"].as_str().unwrap().len(), 64);
}

#[test]
fn malformed_input_exits_one_and_names_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"dim": 2, "norm": {"type": "lp", "p": "two"}}"#).unwrap();
    let out = gbl(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("norm.p"), "{}", stderr(&out));

    std::fs::write(
        &path,
        r#"{"dim": 2, "norm": {"type": "lp", "p": 2}, "extra": 1}"#,
    )
    .unwrap();
    let out = gbl(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("extra"), "{}", stderr(&out));

    std::fs::write(&path, "{\"dim\": 2,\n\"norm\": {").unwrap();
    let out = gbl(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    let out = gbl(&["analyze", "/nonexistent/instance.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn impossible_tolerance_exits_two() {
    // a negative tolerance demands a suppression violation of l2, which has none
    let out = gbl(&["analyze", "l2-canonical-2", "--budget", "50", "--tol=-0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["verdict"]["status"], "inconsistent");
    assert!(stderr(&out).contains("inconsistent"));
}

#[test]
fn witness_summing_two() {
    let out = gbl(&["witness", "summing-2", "--budget", "300"]);
    assert_eq!(out.status.code(), Some(0));
    let c = json(&out);
    assert_eq!(c["kind"], "greedy_violation");
    assert_eq!(c["z"], serde_json::json!([1.0, -2.0]));
    assert_eq!(c["N"], 1);
    assert_eq!(c["lambda"], serde_json::json!([2]));
    assert_eq!(c["ratio"], 2.0);
}

#[test]
fn witness_l1_is_proved_unconditional() {
    let out = gbl(&["witness", "l1-canonical-3", "--budget", "300"]);
    assert_eq!(out.status.code(), Some(0));
    let c = json(&out);
    assert_eq!(c["kind"], "none_found");
    assert_eq!(c["status"], "proved-1-unconditional");
    assert_eq!(c["exact"], true);
}

#[test]
fn witness_hilbert_shear() {
    let out = gbl(&["witness", "shear-2", "--hilbert"]);
    assert_eq!(out.status.code(), Some(0));
    let w = &json(&out)["witnesses"][0];
    assert_eq!((w["i"].as_u64(), w["j"].as_u64()), (Some(1), Some(2)));
    assert_eq!(w["epsilon"], -1.0);
    assert!((w["t"].as_f64().unwrap() - 0.4).abs() < 1e-15);
    assert!((w["certificate"]["ratio"].as_f64().unwrap() - 5f64.sqrt() / 2.0).abs() < 1e-9);

    let out = gbl(&["witness", "summing-2", "--hilbert"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn witness_all_ties_lists_every_greedy_set() {
    let out = gbl(&["witness", "summing-3", "--budget", "200", "--all-ties"]);
    assert_eq!(out.status.code(), Some(0));
    let c = json(&out);
    let sets = c["valid_lambdas"].as_array().unwrap();
    assert!(sets.contains(&c["lambda"]));
}

fn analyze_file(path: &std::path::Path, budget: &str) -> serde_json::Value {
    let out = gbl(&["analyze", path.to_str().unwrap(), "--budget", budget]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    json(&out)
}

#[test]
fn renorm_round_trips_through_analyze() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["shear-2", "summing-2"] {
        let path = dir.path().join(format!("{name}-renorm.json"));
        let out = gbl(&["renorm", name, "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        let r = analyze_file(&path, "2000");
        assert!((r["estimates"]["ksu"]["value"].as_f64().unwrap() - 1.0).abs() <= 1e-12);
        assert!(r["estimates"]["cw"]["value"].as_f64().unwrap() <= 1.0 + 1e-9);
        assert_eq!(r["verdict"]["consistent"], true);
    }
}

#[test]
fn renorm_of_l2_changes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("l2-renorm.json");
    assert_eq!(
        gbl(&["renorm", "l2-canonical-4", "--out", path.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
    let plain = json(&gbl(&["analyze", "l2-canonical-4", "--budget", "300"]));
    let renormed = analyze_file(&path, "300");
    for k in ["ksu", "cw", "ct", "cqg"] {
        let (a, b) = (
            plain["estimates"][k]["value"].as_f64().unwrap(),
            renormed["estimates"][k]["value"].as_f64().unwrap(),
        );
        assert!((a - b).abs() <= 1e-12, "{k}: {a} vs {b}");
    }
}

#[test]
fn renorm_dimension_guard() {
    let out = gbl(&["renorm", "l2-canonical-20"]);
    assert_eq!(out.status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.json");
    let n = 21;
    let gram: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let doc = serde_json::json!({"dim": n, "norm": {"type": "quadratic", "gram": gram}});
    std::fs::write(&path, doc.to_string()).unwrap();
    let out = gbl(&["renorm", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("20"), "{}", stderr(&out));
}

#[test]
fn gallery_list_and_errors() {
    let out = gbl(&["gallery", "--list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().take_while(|l| !l.is_empty()).count() >= 4);

    let out = gbl(&["gallery", "no-such-space"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("summing-{n}"));
}

#[test]
fn gallery_shear_exact_json() {
    let out = gbl(&["gallery", "shear-2"]);
    let v = json(&out);
    assert_eq!(
        v["norm"]["gram"],
        serde_json::json!([[1.0, 0.5], [0.5, 1.25]])
    );
    assert_eq!(v["schema"], "gbl/1");
}

#[test]
fn gallery_output_parses_through_analyze() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["summing-3", "linf-canonical-3", "random-quadratic-3-7"] {
        let path = dir.path().join(format!("{name}.json"));
        let out = gbl(&["gallery", name, "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        let r = analyze_file(&path, "200");
        assert_eq!(r["instance"]["name"], name);
        let direct = json(&gbl(&["analyze", name, "--budget", "200"]));
        assert_eq!(r["instance"]["digest"], direct["instance"]["digest"]);
    }
}

#[test]
fn reports_are_byte_identical() {
    let a = gbl(&[
        "analyze",
        "random-quadratic-4-3",
        "--budget",
        "500",
        "--seed",
        "9",
    ]);
    let b = gbl(&[
        "analyze",
        "random-quadratic-4-3",
        "--budget",
        "500",
        "--seed",
        "9",
    ]);
    assert_eq!(a.stdout, b.stdout);
    let c = gbl(&[
        "analyze",
        "random-quadratic-4-3",
        "--budget",
        "500",
        "--seed",
        "10",
    ]);
    assert_eq!(c.status.code(), Some(0));
}

#[test]
fn thread_count_does_not_change_output() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_gbl"))
            .args(["analyze", "summing-4", "--budget", "400"])
            .env("GBL_THREADS", threads)
            .output()
            .unwrap()
    };
    let (a, b) = (run("1"), run("3"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(run("zero").status.code(), Some(1));
}
