use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_animals"));
    c.env_remove("ANIMALS_CENSUS_DIR");
    c
}

fn run<S: AsRef<std::ffi::OsStr>>(args: &[S]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("bad JSON ({e}): {}\n{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
    })
}

fn docs(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs").join(rel)
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name} in {report}"))
}

#[test]
fn census_writes_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let o = run(&["census", "--d", "2", "--n-max", "8", "--out", a.to_str().unwrap()]);
    assert!(o.status.success());
    let r = json(&o);
    assert_eq!(r["config"]["d"], 2);
    assert_eq!(r["config"]["n_max"], 8);
    assert_eq!(r["result"]["rows"][7]["classes"], 33466);
    assert_eq!(check(&r, "delyon")["status"], "pass");
    let o = run(&["census", "--d", "2", "--n-max", "8", "--out", b.to_str().unwrap(), "--parallelism", "3"]);
    assert!(o.status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.json");
    assert_eq!(run(&["census", "--d", "1", "--out", out.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["percolate", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(run(&["tn", "--n", "5..2"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--only", "nonsense"]).status.code(), Some(2));
    // No --out and no cache directory.
    assert_eq!(run(&["census", "--n-max", "3"]).status.code(), Some(2));
}

#[test]
fn config_file_rejects_unknown_keys_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "d = 2\nnmax = 4\n").unwrap();
    let o = run(&["tn", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nmax"));

    let good = dir.path().join("good.toml");
    std::fs::write(&good, "n = \"1..3\"\np_c = 0.4\n").unwrap();
    let r = json(&run(&["tn", "--config", good.to_str().unwrap(), "--pc", "0.5"]));
    assert_eq!(r["config"]["p_c"], 0.5);
    assert_eq!(r["config"]["n"], "1..3");
    assert_eq!(r["result"]["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_default_and_restricted() {
    let o = run(&["verify"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["status"], "pass");
    for name in ["oracle", "identities", "delyon", "table3", "lemma62", "flips"] {
        assert_eq!(check(&r, name)["status"], "pass", "{name}");
    }
    let r = json(&run(&["verify", "--only", "table3"]));
    assert_eq!(r["checks"].as_array().unwrap().len(), 1);
}

#[test]
fn verify_flags_a_faulty_fixture() {
    let good = docs("fixtures/stats.json");
    let o = run(&["verify", "--only", "fixture", "--fixture", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));

    let mut fx: Value = serde_json::from_str(&std::fs::read_to_string(&good).unwrap()).unwrap();
    fx["cases"][4]["expect"]["m"] = Value::from(9);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, fx.to_string()).unwrap();
    let o = run(&["verify", "--only", "fixture", "--fixture", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let r = json(&o);
    assert_eq!(r["status"], "fail");
    let m = &check(&r, "fixture")["detail"]["mismatches"][0];
    assert!(m["location"].as_str().unwrap().ends_with("cases[4]"));
    assert_eq!((m["field"].as_str(), m["expected"].as_u64(), m["computed"].as_u64()), (Some("m"), Some(9), Some(8)));
}

#[test]
fn verify_catches_a_tampered_census() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    assert!(run(&["census", "--n-max", "5", "--out", path.to_str().unwrap()]).status.success());
    let o = run(&["verify", "--only", "census", "--census", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap().replacen("[1, 6, 2, 4]", "[1, 6, 3, 4]", 1);
    std::fs::write(&path, text).unwrap();
    let o = run(&["verify", "--only", "census", "--census", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(check(&json(&o), "census")["detail"]["error"].as_str().unwrap().contains("checksum"));
}

#[test]
fn tn_table() {
    let o = run(&["tn", "--n", "1..8", "--pc", "0.5"]);
    assert!(o.status.success());
    let r = json(&o);
    let rows = r["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    assert!((rows[0]["t_n"].as_f64().unwrap() - 1.0 / 7.0).abs() < 1e-12);
    assert!((rows[1]["t_n"].as_f64().unwrap() - 0.2).abs() < 1e-12);
    assert!(rows.iter().all(|x| x["t_n"].as_f64().unwrap() <= 0.5));
    assert_eq!(check(&r, "t_1 closed form")["status"], "pass");

    // Without --pc the literature value is used and labelled.
    let r = json(&run(&["tn", "--n", "2"]));
    assert_eq!(r["constants"][0]["name"], "p_c");
    assert!(r["constants"][0]["source"].as_str().unwrap().contains("external"));
}

#[test]
fn percolate_json_and_csv_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let census = dir.path().join("c2.json");
    assert!(run(&["census", "--n-max", "8", "--out", census.to_str().unwrap()]).status.success());
    let census = census.to_str().unwrap();
    let args = |par: &str| -> Vec<String> {
        ["percolate", "--p", "0.1,0.3", "--samples", "2e4", "--seed", "11", "--census", census, "--parallelism", par]
            .map(String::from)
            .to_vec()
    };
    let a = run(&args("1"));
    let b = run(&args("4"));
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let (ra, rb) = (json(&a), json(&b));
    assert_eq!(ra["result"], rb["result"]);
    assert_eq!(ra["config"]["seed"], 11);
    assert_eq!(ra["config"]["samples"], 20000);
    let series = ra["result"]["series"].as_array().unwrap();
    assert_eq!(series.len(), 2);
    assert_eq!(series[0]["cells"].as_array().unwrap().len(), 8);
    assert_eq!(check(&ra, "mc-agreement")["status"], "pass");

    let mut csv_args = args("2");
    csv_args.extend(["--format".to_string(), "csv".to_string()]);
    let c = run(&csv_args);
    let text = String::from_utf8(c.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# schema"));
    assert!(lines[1].starts_with("# config: {"));
    assert_eq!(lines[2], "p,n,p_hat,se,exact,se_exact,z,within_3se");
    assert_eq!(lines.len(), 3 + 16);
}

#[test]
fn census_cache_directory() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .env("ANIMALS_CENSUS_DIR", dir.path())
        .args(["census", "--n-max", "9"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("census-d2-n9.json").exists());
    let o = bin()
        .env("ANIMALS_CENSUS_DIR", dir.path())
        .args(["tn", "--n", "1..6", "--pc", "0.5"])
        .output()
        .unwrap();
    let r = json(&o);
    assert_eq!(r["result"]["census"]["cached"], true);
    assert_eq!(r["result"]["census"]["n_max"], 9);
}

#[test]
fn analyze_reports() {
    let r = json(&run(&["analyze", "pc-bound", "--d", "2", "--k-max", "4"]));
    assert!((r["result"]["bound"].as_f64().unwrap() - 0.34668).abs() < 5e-6);
    assert_eq!(r["result"]["rows"][1]["r"], 100);
    assert_eq!(r["result"]["rows"][1]["violated"], true);
    assert_eq!(check(&r, "pc-bound")["status"], "diagnostic");
    assert_eq!(r["status"], "pass");

    let o = run(&["analyze", "rate-functions", "--grid", "default"]);
    assert!(o.status.success());
    assert!(json(&o)["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));

    let r = json(&run(&["analyze", "probes", "--n-max", "9", "--pc", "0.5"]));
    assert!(r["result"]["label"].as_str().unwrap().starts_with("EXPLORATORY"));
    assert!(r["result"]["lambda"]["value"].is_number());
    assert!(r["result"]["varsigma"]["notes"].as_array().is_some());

    let r = json(&run(&["analyze", "brackets", "--n", "8", "--pc", "0.5"]));
    assert!(r["result"]["report"]["label"].as_str().unwrap().starts_with("DIAGNOSTIC"));
    assert_eq!(r["config"]["proxy"], "max(f_nmax, f_n)");
}

#[test]
fn construct_and_correct() {
    let r = json(&run(&["construct", "rho", "--d", "3", "--a", "1,1"]));
    assert_eq!(r["result"]["stats"]["n"], 26);
    assert_eq!(r["result"]["stats"]["m"], 98);
    assert_eq!(check(&r, "closed-form")["status"], "pass");

    let dir = tempfile::tempdir().unwrap();
    let dom = dir.path().join("domino.json");
    let o = run(&["construct", "phi", "--q", "2,1", "--out", dom.to_str().unwrap()]);
    assert!(o.status.success());
    let built: Value = serde_json::from_str(&std::fs::read_to_string(&dom).unwrap()).unwrap();
    let g = dir.path().join("g.json");
    std::fs::write(&g, built["result"]["animal"].to_string()).unwrap();

    // The 2x1 box has 7 edges and 10 outlying edges: m = ⌊3n/2⌋.
    let o = run(&["construct", "correction", "--beta", "3/2", "--g1", g.to_str().unwrap(), "--g2", g.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_eq!(r["result"]["outcome"], "found");
    assert_eq!(check(&r, "target")["status"], "pass");
    assert_eq!(check(&r, "decompose")["status"], "pass");

    // Off-ratio input is refused unless asked for.
    let o = run(&["construct", "correction", "--beta", "1", "--g1", g.to_str().unwrap(), "--g2", g.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&[
        "construct", "correction", "--beta", "1", "--any-ratio", "--g1", g.to_str().unwrap(), "--g2", g.to_str().unwrap(),
    ]);
    assert!(o.status.success());
}

#[test]
fn reports_follow_the_shipped_schema() {
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(docs("schemas/report.schema.json")).unwrap()).unwrap();
    let required: Vec<&str> = schema["required"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    let r = json(&run(&["analyze", "lemma32"]));
    let keys: Vec<&str> = r.as_object().unwrap().keys().map(String::as_str).collect();
    let mut want = required.clone();
    want.sort();
    let mut got = keys.clone();
    got.sort();
    assert_eq!(got, want);
    assert_eq!(r["schema"], schema["properties"]["schema"]["const"]);
}
