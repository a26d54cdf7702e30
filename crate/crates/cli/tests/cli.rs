use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use quasiherm_cli::io::{operator_to_json, OperatorFile, StateFile};
use quasiherm_core::{c64, model_chain, model_pt2, ComplexMatrix, ComplexVector};

fn quasiherm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quasiherm")).args(args).output().unwrap()
}

fn write_operator(dir: &Path, name: &str, m: &ComplexMatrix) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, operator_to_json(&OperatorFile::from_matrix(m, None))).unwrap();
    path
}

fn write_state(dir: &Path, name: &str, v: &[(f64, f64)]) -> PathBuf {
    let path = dir.join(name);
    let v = ComplexVector::from_iterator(v.len(), v.iter().map(|&(re, im)| c64(re, im)));
    std::fs::write(&path, serde_json::to_string(&StateFile::from_vector(&v)).unwrap()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn csv_rows(out: &[u8]) -> Vec<Vec<String>> {
    String::from_utf8_lossy(out)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn analyze_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let unbroken = write_operator(dir.path(), "u.json", &model_pt2(0.6, 1.0).unwrap().0);
    let broken = write_operator(dir.path(), "b.json", &model_pt2(1.0, 0.6).unwrap().0);

    let out = quasiherm(&["analyze", s(&unbroken)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("verdict Unbroken"));

    let out = quasiherm(&["analyze", s(&broken)]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("verdict Broken"));
    assert!(text.contains("metric::BrokenPhase"));
}

#[test]
fn malformed_json_names_offset() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let text = "{\"dim\": 2, \"matrix\": [[[1, 0], [0, 0]], [[0, 0] [1, 0]]]}";
    std::fs::write(&path, text).unwrap();
    // the missing comma sits just before the second pair of the last row
    let offset = text.find("] [").unwrap() + 2;
    let out = quasiherm(&["analyze", s(&path)]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("cli::ParseError"), "{err}");
    assert!(err.contains(&format!("byte {offset}:")), "{err}");
}

#[test]
fn module_errors_are_qualified() {
    let dir = tempfile::tempdir().unwrap();
    // not exchange-symmetric
    let h = ComplexMatrix::from_diagonal(&[c64(0.0, 1.0), c64(0.0, 0.0)]);
    let path = write_operator(dir.path(), "h.json", &h);
    let out = quasiherm(&["analyze", s(&path)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("krein::NotPseudoHermitian"));

    let p3 = write_operator(dir.path(), "p.json", &ComplexMatrix::identity(3));
    let good = write_operator(dir.path(), "g.json", &model_pt2(0.1, 1.0).unwrap().0);
    let out = quasiherm(&["analyze", s(&good), "--pseudometric", s(&p3)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cli::DimensionMismatch"));

    let out = quasiherm(&["analyze"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn json_report_lists_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_operator(dir.path(), "c.json", &model_chain(6, 0.5, 1.0).unwrap().0);
    let out = quasiherm(&["analyze", s(&path), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let names: Vec<&str> = v["certificates"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    for required in ["pseudo_hermiticity_residual", "quasi_hermiticity_residual", "c_involutivity_residual"] {
        assert!(names.contains(&required));
    }
    for c in v["certificates"].as_array().unwrap() {
        if let Some(bound) = c["bound"].as_f64() {
            assert!(c["value"].as_f64().unwrap() <= bound, "{c}");
        }
    }
    assert_eq!(v["hermitized_spectrum"].as_array().unwrap().len(), 6);
    assert_eq!(v["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn hermitian_evolution_keeps_unit_norm() {
    let dir = tempfile::tempdir().unwrap();
    let h = ComplexMatrix::new(2, vec![c64(1.0, 0.0), c64(0.5, -0.2), c64(0.5, 0.2), c64(-1.0, 0.0)]).unwrap();
    let hp = write_operator(dir.path(), "h.json", &h);
    let st = write_state(dir.path(), "s.json", &[(3.0, 0.0), (0.0, 4.0)]);
    let out = quasiherm(&[
        "evolve", s(&hp), "--pseudometric", "identity", "--state", s(&st), "--t-max", "5", "--steps", "50",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out.stdout);
    assert_eq!(rows.len(), 51);
    for r in rows {
        let sn: f64 = r[1].parse().unwrap();
        assert!((sn - 1.0).abs() < 1e-12);
        assert_eq!(format!("{sn:.9}"), "1.000000000");
    }
}

#[test]
fn unbroken_cell_conserves_metric_norm_only() {
    let dir = tempfile::tempdir().unwrap();
    let hp = write_operator(dir.path(), "h.json", &model_pt2(0.6, 1.0).unwrap().0);
    let st = write_state(dir.path(), "s.json", &[(1.0, 0.0), (0.0, 0.0)]);
    for picture in ["schrodinger", "heisenberg"] {
        let out = quasiherm(&[
            "evolve", s(&hp), "--state", s(&st), "--t-max", "10", "--steps", "100", "--picture", picture,
            "--observable", s(&hp),
        ]);
        assert_eq!(out.status.code(), Some(0));
        let text = String::from_utf8_lossy(&out.stdout);
        assert!(text.starts_with("# quasiherm evolve"));
        assert!(text.contains("# metric pc-normalized"));
        let rows = csv_rows(&out.stdout);
        let f: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
        for r in &rows {
            assert!((r[1].parse::<f64>().unwrap() - 1.0).abs() < 1e-9);
        }
        assert!(f.iter().fold(0.0f64, |m, x| m.max((x - f[0]).abs())) > 1e-2);
        assert_eq!(rows[0].len(), 5);
    }
}

#[test]
fn broken_evolution_needs_force() {
    let dir = tempfile::tempdir().unwrap();
    let hp = write_operator(dir.path(), "h.json", &model_pt2(1.0, 0.6).unwrap().0);
    let st = write_state(dir.path(), "s.json", &[(1.0, 0.0), (1.0, 0.0)]);
    let base = ["evolve", s(&hp), "--state", s(&st), "--t-max", "4", "--steps", "8"];
    let out = quasiherm(&base);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());

    let mut forced = base.to_vec();
    forced.push("--force");
    let out = quasiherm(&forced);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("# WARNING: broken phase"));
    let f: Vec<f64> = csv_rows(&out.stdout).iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(f.last().unwrap() > &(10.0 * f[0]));
}

#[test]
fn sweep_examples() {
    let out = quasiherm(&["sweep", "--family", "pt2", "--a", "0:1.5:0.5", "--b", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().next().unwrap(), "a,b,verdict,max_im_E,min_theta_eig");
    let rows = csv_rows(&out.stdout);
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[3][2], "Broken");
    assert_eq!(rows[2][2], "ExceptionalPoint");

    let out = quasiherm(&["sweep", "--family", "pt2", "--a", "0.3", "--b", "1"]);
    assert_eq!(csv_rows(&out.stdout).len(), 1);

    let out = quasiherm(&["sweep", "--family", "pt2", "--a", "0:1:0", "--b", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cli::InvalidGrid"));

    let out = quasiherm(&["sweep", "--family", "chain", "--n", "4", "--gamma", "0"]);
    let rows = csv_rows(&out.stdout);
    assert_eq!(rows[0][3], "Unbroken");
    assert!((rows[0][5].parse::<f64>().unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("diagram.csv");
    let out = quasiherm(&["sweep", "--family", "pt2", "--a", "0:2:0.25", "--b", "1", "--out", s(&out_path)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let direct = quasiherm(&["sweep", "--family", "pt2", "--a", "0:2:0.25", "--b", "1"]);
    assert_eq!(std::fs::read(&out_path).unwrap(), direct.stdout);
    // no temporary files left behind
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}
