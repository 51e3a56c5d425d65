use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

use cue_hurwitz::algebra::{int, QSeries};
use cue_hurwitz::quasimodular::{eisenstein, Eisenstein};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cue-hurwitz"))
}

fn run(args: &[&str]) -> Output {
    bin()
        .args(args)
        .env_remove("CUE_HURWITZ_BUDGET")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn write_series(path: &Path, series: &QSeries) {
    fs::write(path, serde_json::to_string(&series.to_json()).unwrap()).unwrap();
}

#[test]
fn hurwitz_oracle_and_content_agree_on_the_spot_value() {
    for mode in ["oracle", "content"] {
        for connected in [false, true] {
            let mut args = vec![
                "hurwitz",
                "--d",
                "2",
                "--pattern",
                r#"{"e":[],"h":[2]}"#,
                "--mode",
                mode,
            ];
            if connected {
                args.push("--connected");
            }
            let out = run(&args);
            assert_eq!(out.status.code(), Some(0));
            let v = json_of(&out);
            assert_eq!(v["count"], "4");
            assert_eq!(v["mode"], mode);
            assert_eq!(v["connected"], connected);
            assert_eq!(v["pattern"]["h"], serde_json::json!([2]));
        }
    }
}

#[test]
fn hurwitz_odd_chain_length_counts_zero() {
    let out = run(&["hurwitz", "--d", "2", "--pattern", r#"{"e":[],"h":[1]}"#]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["count"], "0");
}

#[test]
fn oracle_budget_comes_from_the_environment() {
    let args = ["hurwitz", "--d", "4", "--pattern", r#"{"h":[2]}"#, "--mode", "oracle"];
    let out = bin().args(args).env("CUE_HURWITZ_BUDGET", "10").output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json_of(&out)["error"], "budget_exceeded");
    let out = bin()
        .args(args)
        .env("CUE_HURWITZ_BUDGET", "100000000")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(
        run(&["hurwitz", "--d", "2", "--pattern", "nope"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["hurwitz", "--d", "0", "--pattern", "{}"]).status.code(), Some(2));
    assert_eq!(run(&["hurwitz", "--frobnicate"]).status.code(), Some(2));
    assert_eq!(
        run(&["fit", "--series", "/nonexistent/series.json", "--weight-cap", "4"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["expand", "--kind", "genus", "--dmax", "4"]).status.code(),
        Some(2)
    );
}

#[test]
fn expand_moments_spot_values() {
    let out = run(&[
        "expand", "--kind", "moments", "--m", "0", "--n", "1", "--dmax", "2", "--horder", "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(
        v["coeffs"][2][2]["terms"],
        serde_json::json!([{"coeff": "2", "exp": [2]}])
    );
    assert_eq!(
        v["coeffs"][1][0]["terms"],
        serde_json::json!([{"coeff": "1", "exp": [0]}])
    );
}

#[test]
fn expand_cumulants_genus_one_layer() {
    let out = run(&[
        "expand",
        "--kind",
        "cumulants",
        "--m",
        "0",
        "--n",
        "1",
        "--dmax",
        "6",
        "--horder",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let expected = ["1", "3/2", "4/3", "7/4", "6/5", "2"];
    for (d, want) in (1..=6).zip(expected) {
        assert_eq!(v["coeffs"][d][0]["terms"][0]["coeff"], want, "q^{d}");
    }
}

#[test]
fn fit_recovers_e2_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e2.json");
    write_series(&path, &eisenstein(Eisenstein::E2, 30));
    let out = run(&["fit", "--series", path.to_str().unwrap(), "--weight-cap", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["status"], "FIT");
    assert_eq!(
        v["form"]["terms"],
        serde_json::json!([{"coeff": "1", "e2": 1, "e4": 0, "e6": 0}])
    );
}

#[test]
fn fit_of_connected_genus_two_series_validates() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f2.json");
    let expand = run(&[
        "expand",
        "--kind",
        "genus",
        "--g",
        "2",
        "--connected",
        "--m",
        "0",
        "--n",
        "1",
        "--dmax",
        "30",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(expand.status.code(), Some(0));
    let out = run(&[
        "fit",
        "--series",
        path.to_str().unwrap(),
        "--weight-cap",
        "6",
        "--validate",
        "15",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json_of(&out);
    assert_eq!(v["status"], "FIT");
    assert!(v["validated_coefficients"].as_u64().unwrap() >= 15);
}

#[test]
fn fit_reports_mismatch_for_a_generic_series() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("noise.json");
    let coeffs = (0..=30).map(|k| int((k * k * 7 + 3 * k + 1) % 11 - 5)).collect();
    write_series(&path, &QSeries::from_rationals(coeffs));
    let out = run(&["fit", "--series", path.to_str().unwrap(), "--weight-cap", "6"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert_eq!(v["status"], "NOT_QUASIMODULAR_AT_CAP");
    assert!(v["first_mismatch"].as_u64().unwrap() <= 30);
}

#[test]
fn verify_examples_pass() {
    let cases: [&[&str]; 6] = [
        &["verify", "--identity", "cauchy", "--N", "3", "--order", "8"],
        &["verify", "--identity", "mss", "--N", "3", "--trials", "4"],
        &["verify", "--identity", "diaconis", "--dmax", "5"],
        &["verify", "--identity", "hciz", "--N", "2", "--q", "0.01"],
        &["verify", "--identity", "kgr", "--N", "2"],
        &[
            "verify",
            "--identity",
            "schur-norm",
            "--lambda",
            "1",
            "--N",
            "2",
            "--samples",
            "2000",
        ],
    ];
    for args in cases {
        let out = run(args);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
        assert_eq!(json_of(&out)["pass"], true);
    }
}

#[test]
fn verify_failure_exits_with_one() {
    // a tolerance no floating-point comparison can meet
    let out = run(&["verify", "--identity", "hciz", "--N", "2", "--tol", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["pass"], false);
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let base = [
        "verify",
        "--identity",
        "schur-norm",
        "--lambda",
        "2,1",
        "--N",
        "3",
        "--samples",
        "500",
        "--seed",
        "9",
    ];
    let first = run(&base);
    let mut threaded = vec!["--threads", "3"];
    threaded.extend(base);
    let second = run(&threaded);
    assert_eq!(first.stdout, second.stdout);
    let a = run(&[
        "expand",
        "--kind",
        "cumulants",
        "--m",
        "1",
        "--n",
        "1",
        "--dmax",
        "4",
        "--horder",
        "2",
    ]);
    let b = run(&[
        "expand",
        "--kind",
        "cumulants",
        "--m",
        "1",
        "--n",
        "1",
        "--dmax",
        "4",
        "--horder",
        "2",
    ]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn manifest_accompanies_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("count.json");
    let out = run(&[
        "hurwitz",
        "--d",
        "3",
        "--pattern",
        r#"{"h":[2]}"#,
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let bytes = fs::read(&out_path).unwrap();
    let body = bytes.strip_suffix(b"\n").unwrap();
    let manifest: Value =
        serde_json::from_slice(&fs::read(dir.path().join("count.json.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "hurwitz");
    assert_eq!(manifest["exit_code"], 0);
    assert_eq!(manifest["output_sha256"], hex::encode(Sha256::digest(body)));
    assert!(manifest["args"].as_array().unwrap().iter().any(|a| a == "--pattern"));
    assert!(manifest["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    assert!(manifest["versions"]["cue-hurwitz"].is_string());
}

#[test]
fn manifest_goes_to_stderr_without_out() {
    let out = run(&["verify", "--identity", "cauchy", "--trials", "2", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let manifest: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(manifest["seeds"], serde_json::json!([5]));
    let body = out.stdout.strip_suffix(b"\n").unwrap();
    assert_eq!(manifest["output_sha256"], hex::encode(Sha256::digest(body)));
}
