use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypheat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn kernel_reports_log_derivatives() {
    let out = run(&["kernel", "-n", "3", "-t", "1", "-r", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["dt_log_k"].as_f64().unwrap(), -2.5);
    assert_eq!(v["method"], "closed_form_h3");
    assert_eq!(v["schema_version"], 1);

    let v = json(&run(&["kernel", "-n", "3", "-t", "1", "-r", "2"]));
    let z2 = 1.0 / 2f64.tanh() - 0.5;
    assert!((v["dr_log_k"].as_f64().unwrap() + 1.0 + z2).abs() < 1e-14);
}

#[test]
fn kernel_rejects_unsupported_input() {
    let out = run(&["kernel", "-n", "12", "-t", "1", "-r", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unsupported dimension"));
    assert_eq!(
        run(&["kernel", "-n", "3", "-t", "-1", "-r", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["kernel", "-n", "3"]).status.code(), Some(2));
}

#[test]
fn verify_sharp_estimate_passes() {
    let out = run(&["verify", "sharp-h3", "--dim", "3", "--trials", "1000", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    let gap = v["results"][0]["grid"]["max_abs_equality_gap"].as_f64().unwrap();
    assert!(gap <= 1e-10);
}

#[test]
fn odd_constant_fails_on_the_plane_with_witness() {
    let out = run(&[
        "verify",
        "dt-lower",
        "--dim",
        "2",
        "--use-odd-constant",
        "--trials",
        "200",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let w = &v["results"][0]["witness"];
    assert!(w["slack"].as_f64().unwrap() < -1e-6);
    assert!(String::from_utf8_lossy(&out.stderr).contains("witness"));
    let even = run(&["verify", "dt-lower", "--dim", "2", "--trials", "200"]);
    assert_eq!(even.status.code(), Some(0));
}

#[test]
fn verify_usage_errors() {
    assert_eq!(run(&["verify", "bogus-name"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "sharp-h3", "--dim", "5"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "li-yau", "--alpha", "0.5"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "yau", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "yau", "--tol", "0"]).status.code(), Some(2));
}

#[test]
fn verify_writes_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&[
        "verify",
        "general",
        "--dim",
        "2,5",
        "--trials",
        "100",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["results"].as_array().unwrap().len(), 2);
    assert_eq!(v["results"][0]["grid"]["estimate"]["tag"], "general_even");
    assert_eq!(v["results"][1]["grid"]["estimate"]["tag"], "general_odd");
}

#[test]
fn harnack_and_concavity_targets() {
    let out = run(&["verify", "harnack", "--dim", "3,5", "--trials", "200"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["reports"].as_array().unwrap().len(), 2);
    let out = run(&["verify", "concavity"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["passed"], true);
}

#[test]
fn series_commands() {
    let out = run(&["series", "first", "--order", "400"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let k3 = v["rows"].as_array().unwrap().iter().find(|r| r["k"] == 3).unwrap();
    assert_eq!(k3["coefficient_numerator"], "-512");

    let v = json(&run(&["series", "second", "--order", "400"]));
    let k5 = v["rows"].as_array().unwrap().iter().find(|r| r["k"] == 5).unwrap();
    assert_eq!(k5["inner"], "-1680");

    assert_eq!(run(&["series", "first", "--order", "4"]).status.code(), Some(2));
    assert_eq!(run(&["series", "dominance", "--order", "50"]).status.code(), Some(0));
    assert_eq!(run(&["series", "third"]).status.code(), Some(2));
}

#[test]
fn compare_csv_and_json_agree() {
    let csv = run(&["compare", "--t-values", "0.5,1", "--r-values", "0,1,2"]);
    assert_eq!(csv.status.code(), Some(0));
    let text = String::from_utf8(csv.stdout).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    for col in [
        "li_yau_1.5",
        "li_yau_2",
        "yau",
        "bakry_qian",
        "bakry_phi",
        "sharp_h3",
        "sharp_h3_simple",
        "general_h",
        "linearized_r0_0",
        "linearized_r0_1",
    ] {
        assert!(header.split(',').any(|c| c == col), "missing {col}");
    }
    assert_eq!(lines.count(), 6);

    let v = json(&run(&[
        "compare",
        "--t-values",
        "0.5,1",
        "--r-values",
        "0,1,2",
        "--format",
        "json",
    ]));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    let sharp = v["columns"]
        .as_array()
        .unwrap()
        .iter()
        .position(|c| c == "sharp_h3")
        .unwrap();
    let row = rows.iter().find(|r| r["t"] == 1.0 && r["r"] == 0.0).unwrap();
    assert!(row["slacks"][sharp].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(run(&["compare", "--dim", "13"]).status.code(), Some(2));
}

#[test]
fn output_is_reproducible() {
    let a = run(&["verify", "beta-family", "--dim", "4", "--trials", "100", "--seed", "3"]);
    let b = run(&["verify", "beta-family", "--dim", "4", "--trials", "100", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
}
