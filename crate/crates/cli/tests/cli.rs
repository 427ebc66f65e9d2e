use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sphere_sos::conic::read_problem;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sphere-sos"));
    c.env_remove("SPHERE_SOS_BACKEND");
    c
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_ok(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn minimize_bilinear_is_exact_at_order_one() {
    let v = json_ok(&["minimize", &data("xy.json"), "--set", "sphere2x3", "--t", "1"]);
    let r = &v["result"];
    assert!((num(&r["lower_bound"]) + 1.0).abs() < 1e-6);
    assert!((num(&r["oracle_min"]) + 1.0).abs() < 1e-9);
    assert!(num(&r["gap"]).abs() < 1e-6);
    assert_eq!(r["certificate_degree"], 2);
    assert_eq!(v["manifest"]["command"], "minimize");
    assert_eq!(v["manifest"]["backend"]["name"], "dense-ipm");
}

#[test]
fn minimize_constant() {
    for src in [data("const5.json"), "const:5".to_string()] {
        let v = json_ok(&["minimize", &src, "--t", "1"]);
        assert!((num(&v["result"]["lower_bound"]) - 5.0).abs() < 1e-6, "{src}");
    }
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"layout\": [[\"x\", 3]").unwrap();
    let bad = bad.to_string_lossy();
    assert_eq!(code(&["minimize", &bad, "--t", "1"]), 2);
    assert_eq!(code(&["minimize", &data("xy.json"), "--set", "ball3", "--t", "1"]), 2);
    assert_eq!(code(&["minimize", &data("xy.json"), "--set", "sphere1x6", "--t", "1"]), 2);
    assert_eq!(code(&["minimize", &data("xy.json"), "--t", "1", "--backend", "nope"]), 2);
    assert_eq!(code(&["minimize", &data("xy.json")]), 2);
    assert_eq!(code(&["qwass", &data("qubit0.json"), &bad]), 2);
    let out = bin().args(["minimize", &data("xy.json"), "--t", "1"]).env("SPHERE_SOS_BACKEND", "nope").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope"));
}

#[test]
fn low_order_for_the_degree() {
    assert_eq!(code(&["minimize", "random:4", "--t", "1"]), 4);
}

#[test]
fn lambda_meets_the_deficit_bound() {
    let v = json_ok(&["lambda", "--n", "3", "--d", "2", "--t", "17"]);
    let r = &v["result"];
    let deficit = num(&r["deficit"]);
    assert!(deficit <= 72.0 / 289.0);
    assert!((num(&r["deficit_bound"]) - 72.0 / 289.0).abs() < 1e-11);
    assert_eq!(r["within_bound"], true);
    let values = r["lambda"]["values"].as_array().unwrap();
    assert!((num(&values[0]) - 1.0).abs() < 1e-6);
    for (k, v) in values.iter().enumerate().take(3).skip(1) {
        let l = num(v);
        assert!((0.5 - 1e-6..=1.0 + 1e-6).contains(&l), "lambda_{k} = {l}");
    }
}

#[test]
fn lambda_degree_zero() {
    let v = json_ok(&["lambda", "--n", "3", "--d", "0", "--t", "5"]);
    assert_eq!(num(&v["result"]["lambda"]["values"][0]), 1.0);
    assert_eq!(num(&v["result"]["deficit"]), 0.0);
}

#[test]
fn lambda_order_too_small() {
    let out = run(&["lambda", "--n", "3", "--d", "2", "--t", "1"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("order too small"));
    assert_eq!(code(&["lambda", "--n", "3", "--d", "5", "--t", "2"]), 4);
}

fn parse_csv(text: &str) -> Vec<Vec<f64>> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,lower_bound,oracle_min,gap,theory_bound"));
    lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect()
}

#[test]
fn rate_experiment_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out: PathBuf = dir.path().join("sweep.csv");
    let args = ["rate-experiment", "bilinear", "--set", "sphere2x3", "--t-list", "1,2", "--seed", "11"];
    let first = run(&[&args[..], &["--out", &out.to_string_lossy()]].concat());
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv, String::from_utf8_lossy(&first.stdout));
    let rows = parse_csv(&csv);
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert!(r[3].abs() <= 1e-5, "gap {}", r[3]);
    }
    assert!(rows[1][3] <= rows[0][3] + 1e-6);
    assert!((rows[0][4] / rows[1][4] - 4.0).abs() < 1e-10);

    let dat = std::fs::read_to_string(dir.path().join("sweep.dat")).unwrap();
    assert!(dat.starts_with("# t lower_bound"));
    assert_eq!(dat.lines().count(), 3);
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["manifest"]["seed"], 11);
    assert_eq!(manifest["manifest"]["command"], "rate-experiment");

    let serial = run(&[&args[..], &["--serial"]].concat());
    assert_eq!(String::from_utf8_lossy(&serial.stdout), csv);
}

#[test]
fn rate_experiment_rejects_unsorted_orders() {
    assert_eq!(code(&["rate-experiment", "bilinear", "--t-list", "2,1"]), 2);
}

#[test]
fn qwass_identical_and_orthogonal() {
    let (e0, e1) = (data("qubit0.json"), data("qubit1.json"));
    let same = json_ok(&["qwass", &e0, &e0, "--t", "2"]);
    assert!(num(&same["result"]["w2"]) <= 1e-3);
    let orth = json_ok(&["qwass", &e0, &e1, "--t", "2"]);
    let r = &orth["result"];
    assert!(num(&r["w2_squared_lower"]) <= 2.0 + 1e-6);
    assert_eq!(r["certified"], false);
    assert_eq!(r["t"], 2);
}

#[test]
fn constants_values() {
    let v = json_ok(&["constants", "--n", "3", "--d", "2"]);
    let r = &v["result"];
    assert_eq!(r["c_bisphere"], 8 * 9 * 8 * 6 * 5);
    assert_eq!(r["c_multisphere_exact"], r["c_bisphere"]);
    assert_eq!(r["gamma_squared_bound"], 5);
    let k2 = json_ok(&["constants", "--n", "2", "--d", "2"]);
    let c44 = json_ok(&["constants", "--n", "4", "--d", "4"]);
    let expected = 3 * 11 * c44["result"]["c_bisphere"].as_u64().unwrap() / 2;
    assert_eq!(k2["result"]["kappa"]["exact"].as_u64().unwrap(), expected);
}

#[test]
fn every_command_exports_and_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    json_ok(&["minimize", &data("xy.json"), "--t", "1", "--seed", "4", "--export-problem", &p("min.txt")]);
    json_ok(&["lambda", "--n", "3", "--d", "2", "--t", "3", "--seed", "4", "--export-problem", &p("lam.txt")]);
    json_ok(&["qwass", &data("qubit0.json"), &data("mixed2.json"), "--seed", "4", "--export-problem", &p("qw.txt")]);
    json_ok(&["constants", "--n", "3", "--d", "2", "--seed", "4", "--export-problem", &p("none.txt")]);
    let out = run(&["rate-experiment", "const:1", "--t-list", "1,2", "--seed", "4", "--export-problem", &p("rate.txt")]);
    assert!(out.status.success());
    for f in ["min.txt", "lam.txt", "qw.txt", "rate.t1.txt", "rate.t2.txt"] {
        let text = std::fs::read_to_string(p(f)).unwrap();
        let problem = read_problem(&text).unwrap_or_else(|e| panic!("{f}: {e}"));
        assert!(problem.num_vars() > 0);
    }
    assert!(!Path::new(&p("none.txt")).exists());
}

#[test]
fn out_file_embeds_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let v = json_ok(&["constants", "--n", "3", "--d", "1", "--out", &path.to_string_lossy()]);
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(saved, v);
    assert_eq!(saved["manifest"]["tool_version"], env!("CARGO_PKG_VERSION"));
    assert!(saved["manifest"]["arguments"].as_array().unwrap().len() >= 5);
}
