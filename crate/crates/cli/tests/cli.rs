use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn detmart(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_detmart"))
        .args(args)
        .env_remove("DETMART_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = detmart(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

fn keys(v: &Value) -> Vec<String> {
    let mut k: Vec<String> = v.as_object().unwrap().keys().cloned().collect();
    k.sort();
    k
}

#[test]
fn kernel_finite_grid() {
    let text = stdout(&["kernel", "--sites", "0,2", "--grid", "s=1,t=1,x=-3..3,y=-3..3"]);
    assert_eq!(text.lines().next(), Some("s,x,t,y,value,mode"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 49);
    let diag = rows.iter().find(|r| r[..4] == ["1", "1", "1", "1"]).unwrap();
    assert_eq!(diag[4], "1/2");
    assert_eq!(diag[5], "exact");
    assert!(rows.iter().filter(|r| r[1] == "0").all(|r| r[4] == "0"));
}

#[test]
fn kernel_float_matches_exact() {
    let args = ["kernel", "--sites", "0,2,4", "--grid", "s=1,t=3,x=-1..5,y=-3..7"];
    let exact = csv_rows(&stdout(&args));
    let float = csv_rows(&stdout(&[&args[..], &["--mode", "float"]].concat()));
    for (e, f) in exact.iter().zip(&float) {
        let q = match e[4].split_once('/') {
            Some((n, d)) => n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap(),
            None => e[4].parse().unwrap(),
        };
        assert!((q - f[4].parse::<f64>().unwrap()).abs() < 1e-12);
        assert_eq!(f[5], "float");
    }
}

#[test]
fn kernel_sine_diagonal() {
    let rows = csv_rows(&stdout(&["kernel", "--equidistant", "a=2", "--sine", "--dt", "0", "--dx", "0..8"]));
    assert_eq!(rows.len(), 9);
    assert_eq!(rows[0][3], "0");
    assert!((rows[0][4].parse::<f64>().unwrap() - 0.5).abs() < 1e-10);
}

#[test]
fn kernel_empty_grid_is_header_only() {
    let text = stdout(&["kernel", "--sites", "0,2", "--grid", "s=1,t=1,x=3..-3"]);
    assert_eq!(text, "s,x,t,y,value,mode\n");
}

#[test]
fn kernel_infinite_and_continuum() {
    let rows = csv_rows(&stdout(&["kernel", "--equidistant", "2", "--grid", "s=0,t=0,x=0,y=0..8:4"]));
    let vals: Vec<f64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    assert!((vals[0] - 1.0).abs() < 1e-10 && vals[1].abs() < 1e-10 && vals[2].abs() < 1e-10);

    let rows = csv_rows(&stdout(&["kernel", "--continuum", "--sine", "--rho", "0.3"]));
    assert!((rows[0][4].parse::<f64>().unwrap() - 0.3).abs() < 1e-12);
    let rows = csv_rows(&stdout(&["kernel", "--continuum", "--sites", "0,2", "--grid", "s=0.5,t=1,x=0,y=-1..1:0.5"]));
    assert_eq!(rows.len(), 5);
}

#[test]
fn kernel_writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.csv");
    let p = path.to_str().unwrap();
    stdout(&["kernel", "--sites", "0,2", "--grid", "s=0,t=2,x=0,y=-2..4", "-o", p]);
    let text = std::fs::read_to_string(Path::new(p)).unwrap();
    assert_eq!(text.lines().count(), 8);
}

#[test]
fn config_errors_exit_2() {
    for (args, needle) in [
        (vec!["kernel", "--sites", "0,3", "--grid", "s=1"], "odd"),
        (vec!["kernel", "--sites", "2,0", "--grid", "s=1"], "strictly increasing"),
        (vec!["kernel", "--equidistant", "1"], "at least 2"),
        (vec!["kernel", "--equidistant", "2", "--mode", "exact"], "exact mode"),
        (vec!["kernel", "--sites", "0,2", "--grid", "s=0.5"], "integer"),
        (vec!["sample", "--sites", "0,2", "--horizon", "1", "--point", "2,0"], "horizon"),
        (vec!["study", "relaxation", "--n", "0"], "positive"),
    ] {
        let out = detmart(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "{args:?}: {err}");
    }
}

#[test]
fn cap_exceeded_exit_3() {
    let out = detmart(&["correlate", "--sites", "0,2,4,6", "--point", "8,0", "--oracle"]);
    assert_eq!(out.status.code(), Some(3));
    let out = detmart(&["sample", "--sites", "0,2,4", "--horizon", "9", "--samples", "10", "--exact"]);
    assert_eq!(out.status.code(), Some(3));
    let out = detmart(&["correlate", "--sites", "0,2", "--point", "3,1", "--oracle", "--cap", "4"]);
    assert_eq!(out.status.code(), Some(3));
    let out = detmart(&["correlate", "--sites", "0,2", "--point", "3,1", "--oracle", "--cap", "6"]);
    assert!(out.status.success());
}

#[test]
fn correlate_schema_and_values() {
    let v = json(&["correlate", "--sites", "0,2", "--point", "1,1", "--oracle"]);
    assert_eq!(keys(&v), ["annotation", "method", "mode", "oracle", "oracle_equal", "points", "sites", "value"]);
    assert_eq!(v["value"], "1/2");
    assert_eq!(v["method"], "determinant");
    assert_eq!(v["oracle"], "1/2");
    assert_eq!(v["oracle_equal"], true);
    assert!(v["annotation"].is_null());

    let v = json(&["correlate", "--sites", "0,2", "--point", "1,1", "--point", "1,1"]);
    assert_eq!(v["value"], "0");
    let v = json(&["correlate", "--sites", "0,2", "--point", "1,0"]);
    assert_eq!(v["value"], "0");
    assert_eq!(v["annotation"], "parity");
}

#[test]
fn correlate_two_time_oracle() {
    for mode in ["exact", "float"] {
        let v = json(&[
            "correlate", "--sites", "0,2,4", "--point", "1,1", "--point", "2,0", "--point", "2,4", "--oracle",
            "--mode", mode,
        ]);
        assert_eq!(v["oracle_equal"], true, "{v}");
    }
}

#[test]
fn correlate_fredholm() {
    let v = json(&[
        "correlate", "--sites", "0,2", "--fredholm", "--chi", "1,1,-1", "--chi", "2,0,1/2", "--oracle",
    ]);
    assert_eq!(keys(&v), [
        "annotation", "method", "mode", "oracle", "oracle_equal", "points", "sites", "value", "weights"
    ]);
    assert_eq!(v["method"], "fredholm");
    assert_eq!(v["value"], v["oracle"]);
    assert_eq!(v["weights"][1], "1/2");
}

#[test]
fn sample_summary_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let ens = dir.path().join(format!("{name}.jsonl"));
        let sum = dir.path().join(format!("{name}.json"));
        let out = Command::new(env!("CARGO_BIN_EXE_detmart"))
            .args(["sample", "--sites", "0,2", "--horizon", "3", "--samples", "20000", "--seed", "11"])
            .args(["--streams", "8", "--point", "1,1", "--exact"])
            .arg("--ensemble")
            .arg(&ens)
            .arg("--output")
            .arg(&sum)
            .env("DETMART_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        (std::fs::read(&ens).unwrap(), std::fs::read(&sum).unwrap())
    };
    let (e1, s1) = run("a", "1");
    let (e2, s2) = run("b", "4");
    assert_eq!(e1, e2);
    assert_eq!(s1, s2);

    let first: Value = serde_json::from_slice(e1.split(|&b| b == b'\n').next().unwrap()).unwrap();
    assert_eq!(keys(&first), ["paths", "weight_den", "weight_num"]);
    assert_eq!(e1.iter().filter(|&&b| b == b'\n').count(), 20000);

    let s: Value = serde_json::from_slice(&s1).unwrap();
    assert_eq!(keys(&s), [
        "estimate", "exact", "horizon", "mean_weight", "mean_weight_std_error", "points", "samples", "seed", "sites",
        "std_error", "streams",
    ]);
    assert_eq!(s["exact"]["mean_weight"], "1");
    assert_eq!(s["exact"]["correlation"], "1/2");
    let mean = s["mean_weight"].as_f64().unwrap();
    let se = s["mean_weight_std_error"].as_f64().unwrap();
    assert!((mean - 1.0).abs() <= 3.0 * se);
    let est = s["estimate"].as_f64().unwrap();
    let se = s["std_error"].as_f64().unwrap();
    assert!((est - 0.5).abs() <= 3.0 * se);
}

#[test]
fn sample_exact_small() {
    let v = json(&["sample", "--sites", "0,2", "--horizon", "1", "--samples", "10", "--point", "1,1", "--exact"]);
    assert_eq!(v["exact"]["correlation"], "1/2");
    let v = json(&["sample", "--sites", "0,2", "--horizon", "1", "--samples", "10"]);
    assert!(v["exact"].is_null());
}

fn column(text: &str, i: usize) -> Vec<f64> {
    csv_rows(text).iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn study_relaxation_decreases() {
    let text = stdout(&["study", "relaxation", "--a", "2", "--n", "4,16,64,256"]);
    assert_eq!(text.lines().next(), Some("n,gap"));
    let g = column(&text, 1);
    assert_eq!(g.len(), 4);
    assert!(g.windows(2).all(|w| w[1] < w[0]), "{g:?}");
    let same = stdout(&["study", "relaxation", "--a", "2", "--geometric", "4:4:4"]);
    assert_eq!(text, same);
}

#[test]
fn study_convergence_decreases() {
    let text = stdout(&["study", "convergence", "--sites", "0,2", "--n", "4,8,16,32"]);
    assert_eq!(text.lines().next(), Some("n,clt_gap,m_gap"));
    let clt = column(&text, 1);
    assert!(clt.windows(2).all(|w| w[1] < w[0]), "{clt:?}");
    assert!(column(&text, 2).iter().all(|&m| m == 0.0));
}

#[test]
fn study_single_scale() {
    let text = stdout(&["study", "convergence", "--n", "4"]);
    assert_eq!(text.lines().count(), 2);
    let text = stdout(&["study", "relaxation", "--n", "16"]);
    assert_eq!(text.lines().count(), 2);
}
