use std::path::Path;
use std::process::{Command, Output};

use num_complex::Complex64;
use qwalk::hamiltonian::{tfim_path, Boundary};
use qwalk::linalg::{fidelity, hermitian_eigensystem};
use serde_json::Value;

fn qwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwalk")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stderr))
    })
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn spectrum_tfim_rows_match() {
    let out = qwalk(&["spectrum", "--model", "tfim", "--n", "3", "--g", "1", "--J", "1", "--encoding", "binary"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    let levels = v["levels"].as_array().unwrap();
    let mult: u64 = levels.iter().map(|l| l["multiplicity"].as_u64().unwrap()).sum();
    assert_eq!(mult, 8);
    for l in levels {
        assert!(l["error"].as_f64().unwrap() < 1e-9);
        let e = l["energy"].as_f64().unwrap();
        assert!((l["theta"].as_f64().unwrap() - e.acos()).abs() < 1e-10);
    }
}

#[test]
fn spectrum_identity_is_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "id.json", r#"{"n_qubits": 2, "terms": [{"pauli": "II", "coeff": 3.0}]}"#);
    let out = qwalk(&["spectrum", "--hamiltonian", &f]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let levels = v["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 1);
    assert_eq!(levels[0]["theta"].as_f64().unwrap(), 0.0);
}

#[test]
fn malformed_file_exits_two_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.json", "{\n  \"n_qubits\": 2,\n  \"terms\": [ {\"pauli\": \"XZ\" \"coeff\": 1} ]\n}\n");
    let out = qwalk(&["spectrum", "--hamiltonian", &f]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
    assert!(err.contains("\"pauli\": \"XZ\""), "{err}");
    let bad_word = write(dir.path(), "word.json", r#"{"n_qubits": 1, "terms": [{"pauli": "Q", "coeff": 1}]}"#);
    assert_eq!(qwalk(&["spectrum", "--hamiltonian", &bad_word]).status.code(), Some(2));
    assert_eq!(qwalk(&["spectrum", "--hamiltonian", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(qwalk(&["spectrum", "--bogus"]).status.code(), Some(2));
}

#[test]
fn spectrum_over_cap_is_input_error() {
    let out = qwalk(&["spectrum", "--model", "tfim", "--n", "20"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn hybrid_needs_long_range() {
    assert_eq!(qwalk(&["spectrum", "--encoding", "hybrid", "--n", "4"]).status.code(), Some(2));
    let ok = qwalk(&["spectrum", "--encoding", "hybrid", "--model", "long-range", "--n", "4"]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn zeno_single_jump_matches_overlap() {
    let out = qwalk(&["zeno", "--model", "tfim", "--n", "3", "--schedule-steps", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let path = tfim_path(3, 1.0, 1.0, Boundary::Open).unwrap();
    let (_, vecs) = hermitian_eigensystem(&path.interpolate(1.0).unwrap().dense_matrix().unwrap());
    let g1: Vec<Complex64> = vecs.column(0).iter().copied().collect();
    let want = fidelity(&g1, &path.ground0.unwrap().amplitudes());
    assert!((v["success_probability"].as_f64().unwrap() - want).abs() < 1e-10);
    assert_eq!(v["schedule"].as_array().unwrap().len(), 2);
}

#[test]
fn zeno_validation() {
    assert_eq!(qwalk(&["zeno", "--schedule", "0,0.5,0.9"]).status.code(), Some(2));
    assert_eq!(qwalk(&["zeno", "--mode", "sample"]).status.code(), Some(2));
    assert_eq!(qwalk(&["zeno", "--schedule", "0,1", "--schedule-steps", "3"]).status.code(), Some(2));
    assert_eq!(qwalk(&["zeno", "--encoding", "hybrid"]).status.code(), Some(2));
}

#[test]
fn zeno_sample_repeats_byte_for_byte() {
    let a = qwalk(&["zeno", "--n", "2", "--mode", "sample", "--seed", "5", "--schedule-steps", "3"]);
    let b = qwalk(&["zeno", "--n", "2", "--mode", "sample", "--seed", "5", "--schedule-steps", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["mode"], "sample");
}

#[test]
fn zeno_model_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "model.json",
        r#"{"h0": {"n_qubits": 2, "terms": [{"pauli": "XI", "coeff": -1}, {"pauli": "IX", "coeff": -1}]},
            "v": {"n_qubits": 2, "terms": [{"pauli": "ZZ", "coeff": 1}]},
            "ground0": "++"}"#,
    );
    let from_file = json(&qwalk(&["zeno", "--hamiltonian", &f, "--schedule-steps", "4"]));
    let built = json(&qwalk(&["zeno", "--n", "2", "--schedule-steps", "4"]));
    assert_eq!(from_file["success_probability"], built["success_probability"]);
}

#[test]
fn config_fills_gaps_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"model": "tfim", "n": 2, "g": 0.5, "format": "csv"}"#);
    let out = qwalk(&["spectrum", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("schema_version,energy"));
    let over = json(&qwalk(&["spectrum", "--config", &cfg, "--format", "json", "--n", "3"]));
    assert_eq!(over["model"]["n_qubits"], 3);
    assert!(over["model"]["description"].as_str().unwrap().contains("g=0.5"));
    let bad = write(dir.path(), "bad.json", r#"{"modle": "tfim"}"#);
    assert_eq!(qwalk(&["spectrum", "--config", &bad]).status.code(), Some(2));
}

#[test]
fn resources_tfim_four_all_encodings() {
    let v = json(&qwalk(&["resources", "--model", "tfim", "--n", "4", "--g", "0.5"]));
    let rows = v["rows"].as_array().unwrap();
    let enc = |e: &str| {
        rows.iter()
            .find(|r| r["method"] == "encoding" && r["encoding"] == e)
            .unwrap()
            .clone()
    };
    let un = enc("unary");
    let bin = enc("binary");
    assert_eq!(un["prepare_rotations"], 2);
    assert_eq!(un["control_qubits"], 8);
    assert_eq!(bin["control_qubits"], 3);
    assert!(un["rotations"].as_f64().unwrap() < bin["rotations"].as_f64().unwrap());
    assert!(rows.iter().any(|r| r["source"] == "estimate" && r["method"] == "trotter_lattice"));
    assert!(rows.iter().any(|r| r["source"] == "measured" && r["method"] == "taylor"));
    assert_eq!(v["log_base"], "natural");
}

#[test]
fn resources_over_cap_degrades_to_estimates() {
    let out = qwalk(&["resources", "--model", "tfim", "--n", "64"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    assert!(rows.iter().all(|r| r["source"] == "estimate"));
    assert!(rows.iter().any(|r| r["method"] == "warning"));
    for m in ["walk", "trotter_lattice", "trotter_chemistry", "taylor"] {
        assert!(rows.iter().any(|r| r["method"] == m));
    }
}

#[test]
fn resources_gap_sweep_is_monotone() {
    let v = json(&qwalk(&["resources", "--model", "tfim", "--n", "3", "--gap", "0.4,0.2,0.1"]));
    let rows = v["rows"].as_array().unwrap();
    let methods = ["walk", "trotter_lattice", "trotter_chemistry", "taylor"];
    for m in methods {
        for src in ["estimate", "measured"] {
            let totals: Vec<f64> = rows
                .iter()
                .filter(|r| r["method"] == m && r["source"] == src && r["encoding"] != "unary")
                .map(|r| r["total"].as_f64().unwrap())
                .collect();
            if totals.is_empty() {
                continue;
            }
            assert_eq!(totals.len(), 3, "{m} {src}");
            assert!(totals.windows(2).all(|w| w[0] <= w[1]), "{m} {src} {totals:?}");
        }
    }
}

#[test]
fn floats_have_twelve_significant_digits() {
    let out = qwalk(&["spectrum", "--model", "tfim", "--n", "2", "--g", "0.3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for tok in text.split(|c: char| !(c.is_ascii_digit() || c == '.' || c == 'e' || c == '-')) {
        if tok.contains('.') {
            let mantissa = tok.split('e').next().unwrap();
            let digits = mantissa.chars().filter(|c| c.is_ascii_digit()).collect::<String>();
            let sig = digits.trim_start_matches('0').len();
            assert!(sig <= 12, "{tok}");
        }
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(qwalk(&["--help"]).status.code(), Some(0));
    assert_eq!(qwalk(&["resources", "--help"]).status.code(), Some(0));
}
