use std::fs;
use std::path::{Path, PathBuf};

use assert_cmd::Command;
use predicates::prelude::*;
use tempfile::TempDir;

use zhps::circuits::{circuit_to_pathsum, parse_circuit};
use zhps::diagram::Diagram;
use zhps::numeric::{Phase, ScalarFactor};
use zhps::oracle::{compare, eval_pathsum, CompareMode, DenseMatrix, OracleOptions};
use zhps::pathsum::{purify, PurePathSum};
use zhps::poly::{BoolPoly, Monomial, PhasePoly};
use zhps::random;

fn zhps() -> Command {
    let mut c = Command::cargo_bin("zhps").unwrap();
    c.env_remove("ZHPS_ORACLE_CAP");
    c
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/toffoli_h_identity.qc")
}

fn stdout(c: &mut Command) -> String {
    String::from_utf8(c.assert().success().get_output().stdout.clone()).unwrap()
}

fn cnot() -> DenseMatrix {
    DenseMatrix::from_real(&[
        &[1., 0., 0., 0.],
        &[0., 1., 0., 0.],
        &[0., 0., 0., 1.],
        &[0., 0., 1., 0.],
    ])
}

#[test]
fn translate_cnot_to_pathsum() {
    let dir = TempDir::new().unwrap();
    let c = file(&dir, "cnot.qc", "qubits 2\ncnot 0 1\n");
    let out = stdout(zhps().args(["translate", "--to", "pathsum", "--in"]).arg(&c));
    let e = PurePathSum::from_json(&out).unwrap();
    // Control passes through; target is joined to a single interior spider.
    assert_eq!(e.num_vars(), 4);
    assert_eq!(e.phi.len(), 3);
    assert!(e.phi.terms().all(|(m, c)| m.degree() == 2 && *c == Phase::half()));
    let m = eval_pathsum(&e, OracleOptions::default()).unwrap();
    assert!(compare(&m, &cnot(), CompareMode::UpToGlobalPhase, 1e-12).is_equal());
}

#[test]
fn pathsum_zh_roundtrip() {
    let dir = TempDir::new().unwrap();
    let mut r = random::rng(4);
    for i in 0..5 {
        let e = random::pathsum(&mut r, 6, 8).compacted();
        let p = file(&dir, &format!("e{i}.json"), &e.to_json());
        let zh = stdout(zhps().args(["translate", "--to", "zh", "--in"]).arg(&p));
        let q = file(&dir, &format!("d{i}.json"), &zh);
        let back = stdout(zhps().args(["translate", "--to", "pathsum", "--in"]).arg(&q));
        assert_eq!(PurePathSum::from_json(&back).unwrap(), e);
    }
}

#[test]
fn malformed_json_is_a_diagnosed_error() {
    let dir = TempDir::new().unwrap();
    let p = file(&dir, "bad.json", "{\"vars\": 2, \"inputs\": [0,");
    zhps()
        .args(["translate", "--to", "zh", "--from", "pathsum", "--in"])
        .arg(&p)
        .assert()
        .code(3)
        .stderr(predicate::str::contains("invalid JSON"));
}

#[test]
fn circuit_parse_error_names_the_line() {
    let dir = TempDir::new().unwrap();
    let p = file(&dir, "c.qc", "qubits 2\nh 0\nfoo 1\n");
    zhps()
        .args(["eval", "--in"])
        .arg(&p)
        .assert()
        .code(3)
        .stderr(predicate::str::contains("line 3"));
}

#[test]
fn simplify_fixture_to_identity() {
    let dir = TempDir::new().unwrap();
    let trace = dir.path().join("trace.json");
    let out = stdout(
        zhps()
            .args(["simplify", "--engine", "diagram", "--in"])
            .arg(fixture())
            .arg("--trace")
            .arg(&trace),
    );
    let d = Diagram::from_json(&out).unwrap();
    assert!(d.is_identity_form());
    assert!(d.hboxes.is_empty());
    assert!(d.scalar.is_one());
    let steps: serde_json::Value = serde_json::from_str(&fs::read_to_string(&trace).unwrap()).unwrap();
    let steps = steps.as_array().unwrap();
    assert!(!steps.is_empty());
    assert!(steps.iter().any(|s| s["rule"] == "hyper-pivot"));
}

#[test]
fn simplify_purified_cnot() {
    let dir = TempDir::new().unwrap();
    let f = [BoolPoly::var(0), BoolPoly::var(0).xor(&BoolPoly::var(1))];
    let e = purify(&f, &PhasePoly::zero(), &ScalarFactor::one(), 2, 0);
    assert_eq!(e.phi.len(), 5);
    let p = file(&dir, "cnot.json", &e.to_json());
    let out = stdout(zhps().args(["simplify", "--engine", "pathsum", "--in"]).arg(&p));
    let r = PurePathSum::from_json(&out).unwrap();
    assert!(r.num_vars() <= 4);
    let m = eval_pathsum(&r, OracleOptions::default()).unwrap();
    assert!(compare(&m, &cnot(), CompareMode::ExactScalar, 1e-12).is_equal());
}

#[test]
fn simplify_minimal_input_is_unchanged() {
    let dir = TempDir::new().unwrap();
    let e = PurePathSum::identity(2);
    let p = file(&dir, "id.json", &e.to_json());
    let trace = dir.path().join("t.json");
    let out = stdout(zhps().args(["simplify", "--in"]).arg(&p).arg("--trace").arg(&trace));
    assert_eq!(PurePathSum::from_json(&out).unwrap(), e);
    assert_eq!(fs::read_to_string(&trace).unwrap().trim(), "[]");
}

#[test]
fn verify_random_circuit_against_itself() {
    let dir = TempDir::new().unwrap();
    let c = random::circuit(&mut random::rng(9), 3, 12, &random::CIRCUIT_GATES);
    let p = file(&dir, "c.qc", &c.to_string());
    zhps()
        .arg("verify")
        .arg(&p)
        .arg(&p)
        .assert()
        .code(0)
        .stdout(predicate::str::starts_with("Equal"));
}

#[test]
fn verify_cnot_vs_swap_is_unequal() {
    let dir = TempDir::new().unwrap();
    let a = file(&dir, "a.qc", "qubits 2\ncnot 0 1\n");
    let b = file(&dir, "b.qc", "qubits 2\nswap 0 1\n");
    zhps()
        .arg("verify")
        .arg(&a)
        .arg(&b)
        .assert()
        .code(2)
        .stdout(predicate::str::contains("Unequal").and(predicate::str::contains("differs")));
}

#[test]
fn verify_toffoli_squared_by_rewriting() {
    let dir = TempDir::new().unwrap();
    let a = file(&dir, "a.qc", "qubits 3\ntof 0 1 2\ntof 0 1 2\n");
    let b = file(&dir, "b.qc", "qubits 3\n");
    for engine in ["pathsum", "diagram"] {
        let out = stdout(
            zhps()
                .args(["verify", "--rewrite-only", "--json", "--engine", engine])
                .arg(&a)
                .arg(&b),
        );
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["status"], "Equal");
        assert_eq!(v["proof"], "Rewriting");
    }
}

#[test]
fn verify_global_phase_mode() {
    let dir = TempDir::new().unwrap();
    let a = file(&dir, "a.qc", "qubits 1\nz 0\nx 0\nz 0\nx 0\n");
    let b = file(&dir, "b.qc", "qubits 1\n");
    zhps().arg("verify").arg(&a).arg(&b).assert().code(2);
    zhps()
        .args(["verify", "--mode", "global-phase"])
        .arg(&a)
        .arg(&b)
        .assert()
        .code(0)
        .stdout(predicate::str::starts_with("EqualUpToGlobalPhase"));
}

#[test]
fn oracle_cap_from_environment() {
    let dir = TempDir::new().unwrap();
    let a = file(&dir, "a.qc", "qubits 2\ncnot 0 1\n");
    let b = file(&dir, "b.qc", "qubits 2\nswap 0 1\n");
    zhps()
        .env("ZHPS_ORACLE_CAP", "1")
        .arg("verify")
        .arg(&a)
        .arg(&b)
        .assert()
        .code(1)
        .stdout(predicate::str::starts_with("NotProven"));
}

#[test]
fn verify_arity_mismatch() {
    let dir = TempDir::new().unwrap();
    let a = file(&dir, "a.qc", "qubits 1\n");
    let b = file(&dir, "b.qc", "qubits 2\n");
    zhps()
        .arg("verify")
        .arg(&a)
        .arg(&b)
        .assert()
        .code(3)
        .stderr(predicate::str::contains("arity mismatch"));
}

#[test]
fn verify_batch_reports_worst_status() {
    let dir = TempDir::new().unwrap();
    file(&dir, "cnot.qc", "qubits 2\ncnot 0 1\n");
    file(&dir, "swap.qc", "qubits 2\nswap 0 1\n");
    file(&dir, "cc.qc", "qubits 2\ncnot 0 1\ncnot 0 1\n");
    file(&dir, "id.qc", "qubits 2\n");
    let ok = file(&dir, "ok.txt", "# pairs\ncnot.qc cnot.qc\ncc.qc id.qc\n");
    let bad = file(&dir, "bad.txt", "cnot.qc cnot.qc\ncnot.qc swap.qc\n");
    let out = stdout(zhps().args(["verify", "--jobs", "2", "--batch"]).arg(&ok));
    assert_eq!(out.lines().count(), 2);
    zhps()
        .args(["verify", "--jobs", "2", "--batch"])
        .arg(&bad)
        .assert()
        .code(2);
}

#[test]
fn eval_hadamard_circuit() {
    let dir = TempDir::new().unwrap();
    let p = file(&dir, "h.qc", "qubits 1\nh 0\n");
    let out = stdout(zhps().args(["eval", "--format", "json", "--in"]).arg(&p));
    let v: Vec<Vec<[f64; 2]>> = serde_json::from_str(&out).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for (i, row) in v.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            let want = if i == 1 && j == 1 { -s } else { s };
            assert!((z[0] - want).abs() < 1e-12 && z[1].abs() < 1e-12);
        }
    }
}

#[test]
fn eval_cnot_pathsum_is_a_permutation() {
    let dir = TempDir::new().unwrap();
    let c = parse_circuit("qubits 2\ncnot 0 1").unwrap();
    let p = file(&dir, "cnot.json", &circuit_to_pathsum(&c).compacted().to_json());
    let out = stdout(zhps().args(["eval", "--in"]).arg(&p));
    let rows: Vec<Vec<&str>> = out.lines().map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows.len(), 4);
    let ones: Vec<(usize, usize)> = rows
        .iter()
        .enumerate()
        .flat_map(|(i, r)| {
            r.iter()
                .enumerate()
                .filter(|(_, z)| **z == "1+0j")
                .map(move |(j, _)| (i, j))
        })
        .collect();
    assert_eq!(ones, [(0, 0), (1, 1), (2, 3), (3, 2)]);
}

#[test]
fn eval_over_cap_is_rejected() {
    let dir = TempDir::new().unwrap();
    let mut e = PurePathSum::identity(0);
    for v in 0..25 {
        e.vars.insert(v);
        e.phi.add_term(Monomial::var(v), Phase::new(1, 4));
    }
    let p = file(&dir, "big.json", &e.to_json());
    zhps()
        .args(["eval", "--in"])
        .arg(&p)
        .assert()
        .code(3)
        .stderr(predicate::str::contains("cap"));
}

#[test]
fn dot_export() {
    let dir = TempDir::new().unwrap();
    let c = file(&dir, "c.qc", "qubits 2\ncnot 0 1\n");
    let dot = dir.path().join("c.dot");
    zhps()
        .args(["translate", "--to", "zh", "--in"])
        .arg(&c)
        .arg("--dot")
        .arg(&dot)
        .assert()
        .success();
    assert!(fs::read_to_string(&dot).unwrap().starts_with("graph zh {"));
}

#[test]
fn selfcheck_is_deterministic() {
    let run = || stdout(zhps().args(["selfcheck", "--seed", "3", "--cases", "4"]));
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    assert!(a.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn selfcheck_flags_negative_control() {
    zhps()
        .args(["selfcheck", "--cases", "3", "--negative-control"])
        .assert()
        .code(1)
        .stdout(predicate::str::contains("FAIL corrupted-omega"));
}

#[test]
fn usage_errors_exit_above_two() {
    zhps().arg("nonsense").assert().code(3);
    zhps().args(["verify", "only-one.qc"]).assert().code(3);
    zhps().arg("--help").assert().success();
}
