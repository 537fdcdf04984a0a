use std::process::{Command, Output};

use serde_json::Value;

fn k3corr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_k3corr")).args(args).env_remove("K3CORR_EPS").output().expect("binary runs")
}

fn report(args: &[&str]) -> (i32, Value) {
    let out = k3corr(args);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("bad json ({}): {}", e, String::from_utf8_lossy(&out.stdout)));
    (out.status.code().unwrap(), v)
}

#[test]
fn blowup_value() {
    let (code, v) = report(&["blowup", "--c1", "3,-2", "--c2", "4,-5", "--h2", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["value"], 38);
    assert_eq!(v["inputs"]["c1"], serde_json::json!([3, -2]));
}

#[test]
fn exp_dim_keys() {
    let (code, v) = report(&["exp-dim", "--genus", "7"]);
    assert_eq!(code, 0);
    let r = &v["result"];
    assert_eq!(r["dim_Hn"], 13);
    assert_eq!(r["dim_CxC"], 9);
    assert_eq!(r["dim_Mg2"], 20);
    assert_eq!(r["expected"], 2);
}

#[test]
fn exp_dim_low_genus_is_an_error() {
    let (code, v) = report(&["exp-dim", "--genus", "2"]);
    assert_ne!(code, 0);
    assert!(v["error"].is_string());
}

#[test]
fn bn_answers() {
    let (_, v) = report(&["bn", "--genus", "4", "--n", "3"]);
    assert_eq!(v["result"]["exists"], true);
    let (_, v) = report(&["bn", "--genus", "10", "--n", "3"]);
    assert_eq!(v["result"]["exists"], false);
    assert_eq!(v["result"]["rho"], -6);
}

#[test]
fn output_is_byte_identical_without_timing() {
    let args = ["--seed", "3", "j-fiber1", "--surface", "random:2", "--point", "sample:1"];
    let a = k3corr(&args);
    let b = k3corr(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn timing_adds_wall_time() {
    let (_, v) = report(&["--timing", "blowup", "--c1", "1,0", "--c2", "1,0"]);
    assert!(v["wall_time_ms"].is_number());
    let (_, v) = report(&["blowup", "--c1", "1,0", "--c2", "1,0"]);
    assert!(v.get("wall_time_ms").is_none());
}

#[test]
fn output_file() {
    let path = std::env::temp_dir().join(format!("k3corr-cli-{}.json", std::process::id()));
    let out = k3corr(&["-o", path.to_str().unwrap(), "bn", "--genus", "3", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(v["result"]["exists"], true);
}

#[test]
fn j_fiber1_on_sampled_point() {
    let (code, v) = report(&["j-fiber1", "--surface", "random:1", "--point", "sample:0"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["generic"], true);
    assert_eq!(v["result"]["fiber"]["pairs"].as_array().unwrap().len(), 2);
}

#[test]
fn point_off_surface_exits_2() {
    let (code, v) = report(&["j-fiber1", "--surface", "fermat", "--point", "[1,\"-1\",0,0]"]);
    assert_eq!(code, 2);
    assert!(v["error"].as_str().unwrap().contains("not on the surface"));
}

#[test]
fn surface_file_round_trip() {
    let (_, v) = report(&["sample", "--surface", "random:4"]);
    let p = v["result"]["points"][0].to_string();
    let path = std::env::temp_dir().join(format!("k3corr-surface-{}.json", std::process::id()));
    let surface = k3corr::surfaces::SurfaceModel::random_quartic(4).to_json();
    std::fs::write(&path, serde_json::to_string(&surface).unwrap()).unwrap();
    let (code, v) = report(&["j-fiber1", "--surface", path.to_str().unwrap(), "--point", &p]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 0, "{}", v);
}

#[test]
fn malformed_input_exits_1() {
    assert_eq!(k3corr(&["bogus"]).status.code(), Some(1));
    assert_eq!(k3corr(&["blowup", "--c1", "3", "--c2", "1,1"]).status.code(), Some(1));
    assert_eq!(k3corr(&["j-fiber1", "--surface", "random:x", "--point", "sample:0"]).status.code(), Some(1));
    assert_eq!(k3corr(&["--eps-cert", "1", "bn", "--genus", "3", "--n", "3"]).status.code(), Some(1));
    assert_eq!(k3corr(&["j-fiber1", "--surface", "/nonexistent.json", "--point", "sample:0"]).status.code(), Some(1));
}

#[test]
fn wrong_surface_kind_is_rejected() {
    let (code, _) = report(&["t-fiber", "--surface", "fermat", "--point", "sample:0"]);
    assert_eq!(code, 1);
}

#[test]
fn z2_certificate_and_precondition() {
    let (code, v) = report(&["z2", "--surface", "random:3", "--p", "ramification:0", "--q", "ramification:1"]);
    assert_eq!(code, 0, "{}", v);
    assert_eq!(v["result"]["n"], 2);
    let (code, _) = report(&["z2", "--surface", "random:3", "--p", "sample:0", "--q", "ramification:1"]);
    assert_eq!(code, 2);
}

#[test]
fn z3_certificate() {
    let (code, v) = report(&["z3", "--surface", "random:1", "--q", "sample:0", "--pairs", "0,2"]);
    assert_eq!(code, 0, "{}", v);
    assert_eq!(v["result"]["n"], 3);
    let (code, _) = report(&["z3", "--surface", "random:1", "--q", "sample:0", "--pairs", "0,99"]);
    assert_eq!(code, 1);
}

#[test]
fn z4_on_constructed_surface() {
    let (code, v) = report(&["z4", "--surface", "shared:0"]);
    assert_eq!(code, 0, "{}", v);
    assert_eq!(v["result"]["certificate"]["n"], 4);
}

#[test]
fn t_fiber_and_search() {
    let (code, v) = report(&["t-fiber", "--surface", "random:1", "--point", "sample:0"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["total_degree"], 6);
    let (code, v) = report(&["t-search", "--surface", "random:1", "--point", "sample:0"]);
    assert_eq!(code, 0);
    assert!(!v["result"]["triples"].as_array().unwrap().is_empty());
}

#[test]
fn suite_dims_and_unknown() {
    let (code, v) = report(&["suite", "dims"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["passed"], true);
    let (code, _) = report(&["suite", "nope"]);
    assert_eq!(code, 1);
}

#[test]
fn sample_on_each_model() {
    for (surface, len) in [("quartic:2", 4), ("ci23:2", 5), ("sextic:2", 4), ("shared:0", 5)] {
        let (code, v) = report(&["sample", "--surface", surface, "--count", "2"]);
        assert_eq!(code, 0, "{}", v);
        assert_eq!(v["result"]["points"][1].as_array().unwrap().len(), len);
        assert!(v["result"]["residuals"].as_array().unwrap().iter().all(|r| r.as_f64().unwrap() < 1e-8));
    }
    let (code, _) = report(&["sample", "--surface", "sextic:2", "--ramification"]);
    assert_eq!(code, 0);
}
