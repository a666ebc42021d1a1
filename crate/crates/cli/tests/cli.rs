use std::io::Write;
use std::process::{Command, Output, Stdio};

fn cqs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cqs"))
        .args(args)
        .output()
        .unwrap()
}

fn cqs_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_cqs"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn irreps_prints_su3_table() {
    let doc = json(&cqs(&["irreps", "--group", "su3", "--truncate", "3"]));
    let entries = doc["entries"].as_array().unwrap();
    let casimirs: Vec<&str> = entries
        .iter()
        .map(|e| e["casimir"].as_str().unwrap())
        .collect();
    let dims: Vec<u64> = entries.iter().map(|e| e["dim"].as_u64().unwrap()).collect();
    assert_eq!(casimirs, ["0", "16/3", "16/3"]);
    assert_eq!(dims, [1, 3, 3]);
}

#[test]
fn irreps_loads_a_table_file() {
    let dir = std::env::temp_dir().join(format!("cqs-irreps-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("table.json");
    std::fs::write(&path, r#"{"group_name":"toy","entries":[{"label":"a","casimir":0,"dim":1},{"label":"b","casimir":1.5,"dim":2}]}"#).unwrap();
    let doc = json(&cqs(&["irreps", "--table", path.to_str().unwrap()]));
    assert_eq!(doc["group_name"], "toy");
    std::fs::write(&path, r#"{"group_name":"toy","entries":[]}"#).unwrap();
    assert_eq!(
        cqs(&["irreps", "--table", path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn compiled_mu_sends_two_singlets_to_singlet_vacuum() {
    let circuit = cqs(&["compile", "--op", "mu", "--mode", "exact"]);
    assert!(circuit.status.success());
    let doc = json(&cqs_stdin(&["simulate", "--in", "1111"], &circuit.stdout));
    assert!(doc["success_probability"].as_f64().unwrap() > 0.0);
    let amplitudes = doc["amplitudes"].as_array().unwrap();
    assert_eq!(amplitudes.len(), 1);
    assert_eq!(amplitudes[0]["state"], "1100");
}

#[test]
fn effective_operator_document() {
    let circuit = cqs(&["compile", "--op", "eps", "--mode", "paper"]);
    let doc = json(&cqs_stdin(
        &["simulate", "--circuit", "-", "--effective"],
        &circuit.stdout,
    ));
    assert_eq!(doc["rows"], 4);
    assert_eq!(doc["cols"], 4);
}

#[test]
fn verify_writes_report_and_passes() {
    let dir = std::env::temp_dir().join(format!("cqs-verify-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = cqs(&[
        "verify",
        "--op",
        "mu",
        "--mode",
        "exact",
        "--report",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    for field in [
        "target_name",
        "mode",
        "relative_residual",
        "fitted_scale",
        "min_success_probability",
        "max_success_probability",
        "axiom_results",
    ] {
        assert!(doc.get(field).is_some(), "missing {field}");
    }
    assert!(doc["relative_residual"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn emit_produces_text_form() {
    let circuit = cqs(&["compile", "--op", "mu", "--mode", "paper"]);
    let out = cqs_stdin(&["emit"], &circuit.stdout);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.starts_with("// cqs circuit\nwork q0, q1, q2, q3;\nancilla a0, a1, a2, a3, a4, a5;\n")
    );
    assert!(text.contains("ry(1.3727073172553577) a0;"));
    assert!(text.contains("postselect a5 -> 0;"));
}

#[test]
fn decompose_lists_pauli_terms() {
    let doc = json(&cqs(&["decompose", "--op", "eps", "--factors"]));
    assert_eq!(doc["qubits"], 2);
    assert!(!doc["terms"].as_array().unwrap().is_empty());
    assert_eq!(doc["factors"].as_array().unwrap().len(), 2);
    let built = cqs(&["build", "--op", "eps"]);
    let piped = json(&cqs_stdin(&["decompose"], &built.stdout));
    assert_eq!(piped["terms"], doc["terms"]);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(cqs(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(cqs(&["build", "--op", "nope"]).status.code(), Some(2));
    assert_eq!(cqs(&["irreps", "--group", "su2"]).status.code(), Some(2));
    assert_eq!(
        cqs_stdin(&["simulate", "--in", "01"], b"not json")
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        cqs(&["compile", "--op", "cylinder", "--mode", "paper"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn help_exists_for_every_subcommand() {
    for sub in [
        "irreps",
        "build",
        "decompose",
        "compile",
        "simulate",
        "verify",
        "reproduce-paper",
        "emit",
    ] {
        let out = cqs(&[sub, "--help"]);
        assert_eq!(out.status.code(), Some(0), "{sub}");
        assert!(!out.stdout.is_empty());
    }
}

#[test]
fn euclidean_reproduction_runs_unasserted() {
    let doc = json(&cqs(&["reproduce-paper", "--convention", "euclidean"]));
    assert_eq!(doc["convention"], "euclidean");
    assert_eq!(doc["angles_asserted"], false);
}
