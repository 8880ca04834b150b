use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn gq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gq"))
        .args(args)
        .output()
        .expect("gq runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gq-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn read_json(p: &PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn corrupted_jacobi_exits_one_and_names_the_triple() {
    let o = gq(&["check-jacobi", "--bundled", "sl2-corrupted"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("(h, e, f)"), "{}", stdout(&o));
    assert_eq!(gq(&["check-jacobi", "--bundled", "sl2"]).status.code(), Some(0));
}

#[test]
fn borel_gutt_twistor_passes_at_order_three() {
    let o = gq(&["check-twistor", "--bundled", "sl2-borel", "--order", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS (exact zero at all orders ≤ K)"));
}

#[test]
fn polarization_prints_determinant_and_witness() {
    let o = gq(&["polarization", "--bundled", "sl2-cartan"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("D(λ) = λ_h^2"), "{text}");
    assert!(text.contains("witness λ_h = 1"), "{text}");
    let o = gq(&[
        "polarization",
        "--bundled",
        "sl2-cartan",
        "--u-plus",
        "1",
        "--u-minus",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failing_residual_reports_counts_and_first_term() {
    let json = tmp("inv.json");
    let o = gq(&[
        "check-invariance",
        "--bundled",
        "sl2-cartan",
        "--bundled-twist",
        "sl2-cartan-noninvariant",
        "--json-out",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL [1 term; ℏ^1: 1]"), "{}", stdout(&o));
    let v = read_json(&json);
    assert_eq!(v["status"], "FAIL");
    assert_eq!(v["checks"]["h"]["countsByOrder"], serde_json::json!([0, 1, 0]));
    assert_eq!(v["checks"]["h"]["firstTerm"], "ℏ^1 · (2*λ_h) ⊗ h ⊗ e");
}

#[test]
fn hypothesis_and_input_errors_exit_two() {
    let o = gq(&[
        "equivalence",
        "--bundled",
        "sl2-cartan",
        "--bundled-twist",
        "sl2-cartan-noninvariant",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("not l-invariant"));
    assert_eq!(
        gq(&["check-jacobi", "--bundled", "no-such-algebra"]).status.code(),
        Some(2)
    );
    assert_eq!(
        gq(&[
            "check-dyn-twist",
            "--bundled",
            "axb",
            "--bundled-twist",
            "oscillator-exp-hz"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        gq(&["check-twistor", "--bundled", "axb", "--order", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        gq(&["check-twistor", "--bundled", "axb", "--mode", "jet"])
            .status
            .code(),
        Some(2)
    );
    let bad = tmp("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(
        gq(&["check-jacobi", "--algebra", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn non_cocycle_twist_fails_with_exit_one() {
    let o = gq(&[
        "check-dyn-twist",
        "--bundled",
        "sl2-cartan",
        "--bundled-twist",
        "sl2-cartan-ef",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let o = gq(&[
        "equivalence",
        "--bundled",
        "sl2-cartan",
        "--bundled-twist",
        "sl2-cartan-ef",
    ]);
    assert_eq!(o.status.code(), Some(0), "agreement on a failing twist is a pass");
}

#[test]
fn jet_mode_runs_from_the_command_line() {
    let o = gq(&[
        "check-dyn-twist",
        "--bundled",
        "oscillator",
        "--bundled-twist",
        "oscillator-exp-hz",
        "--mode",
        "jet",
        "--base-point",
        "1,-2/3",
        "--jet-degree",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn bridged_tensor_round_trips_through_a_file() {
    let out = tmp("bridge.json");
    let o = gq(&[
        "bridge",
        "--bundled",
        "heisenberg",
        "--bundled-twist",
        "heisenberg-exp-central",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = gq(&[
        "check-twistor",
        "--bundled",
        "heisenberg",
        "--tensor",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn classical_limit_of_constant_e_wedge_f_fails() {
    let o = gq(&[
        "classical-limit",
        "--bundled",
        "sl2-cartan",
        "--bundled-twist",
        "sl2-cartan-ef",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("h∧e∧f"), "{}", stdout(&o));
    let o = gq(&[
        "classical-limit",
        "--bundled",
        "oscillator",
        "--bundled-twist",
        "oscillator-exp-hz",
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn reports_are_byte_identical_across_processes() {
    let args = ["equivalence", "--bundled", "sl2-borel", "--random", "4", "--seed", "5"];
    let (a, b) = (tmp("det-a.json"), tmp("det-b.json"));
    for p in [&a, &b] {
        let mut full = args.to_vec();
        full.extend(["--json-out", p.to_str().unwrap()]);
        assert_eq!(gq(&full).status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let other = tmp("det-c.json");
    let mut full = args.to_vec();
    full[6] = "6";
    full.extend(["--json-out", other.to_str().unwrap()]);
    gq(&full);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&other).unwrap());
}
