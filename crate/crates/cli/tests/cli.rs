// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn symprop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symprop")).args(args).output().expect("binary runs")
}

fn write_config(dir: &TempDir, name: &str, json: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const ISING_5: &str = r#"{
    "model": {"ising": {"n": 5, "h_x": 1.4, "h_z": 0.9045, "delta_t": 0.25, "layers": 8}},
    "observable": "mid_chain_z",
    "state": "plus_x",
    "symmetry": "translation_1d"
}"#;

#[test]
fn compare_on_ising_saturates_and_agrees() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "ising.json", ISING_5);
    let out = symprop(&["compare", "--config", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "layer,n_terms_standard,n_terms_symmetry,expectation_standard,expectation_symmetry"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 9);
    for row in &rows {
        let (a, b): (f64, f64) = (row[3].parse().unwrap(), row[4].parse().unwrap());
        assert!((a - b).abs() <= 1e-10);
    }
    // Every traceless string is reached; the identity never is.
    let last = rows.last().unwrap();
    assert_eq!((last[1], last[2]), ("1023", "207"));
}

#[test]
fn propagate_output_is_byte_identical_across_runs_and_threads() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "ising.json", ISING_5);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert!(symprop(&["propagate", "--config", &cfg, "--output", a.to_str().unwrap(), "--threads", "1"])
        .status
        .success());
    assert!(symprop(&["propagate", "--config", &cfg, "--output", b.to_str().unwrap(), "--threads", "4"])
        .status
        .success());
    let a = std::fs::read(a).unwrap();
    assert_eq!(a, std::fs::read(b).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("layer,time,n_terms,sum_abs_coeff,sum_sq_coeff,expectation,wall_ms\n"));
}

#[test]
fn floats_round_trip_with_seventeen_digits() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "ising.json", ISING_5);
    let text = stdout(&symprop(&["propagate", "--config", &cfg]));
    let row: Vec<&str> = text.lines().nth(3).unwrap().split(',').collect();
    let mantissa = row[5].split('e').next().unwrap().replace(['-', '.'], "");
    assert_eq!(mantissa.len(), 17);
}

#[test]
fn mismatched_torus_is_a_validation_error_without_output() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("out.csv");
    let json = format!(
        r#"{{"model": {{"xxz": {{"lx": 3, "ly": 3, "j_perp": 1, "delta": -1.8, "alpha": 3, "delta_t": 0.05, "layers": 2}}}},
            "observable": "total_spin_squared",
            "symmetry": {{"translation_2d": {{"lx": 2, "ly": 2}}}},
            "output_path": {:?}}}"#,
        target.to_str().unwrap()
    );
    let cfg = write_config(&dir, "bad.json", &json);
    let out = symprop(&["propagate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("symmetry.translation_2d"));
    assert!(!Path::new(&target).exists());
}

#[test]
fn asymmetric_circuits_and_states_are_rejected() {
    let dir = TempDir::new().unwrap();
    let open = write_config(
        &dir,
        "open.json",
        r#"{"model": {"ising": {"n": 5, "h_x": 1.4, "h_z": 0.9, "delta_t": 0.25, "layers": 2, "boundary": "open"}},
            "observable": "mid_chain_z", "symmetry": "translation_1d"}"#,
    );
    let out = symprop(&["propagate", "--config", &open]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not invariant"));

    let skewed = write_config(
        &dir,
        "state.json",
        r#"{"model": {"ising": {"n": 3, "h_x": 1.4, "h_z": 0.9, "delta_t": 0.25, "layers": 2}},
            "observable": {"pauli": "ZII"}, "symmetry": "dihedral",
            "state": {"bloch_per_qubit": [[1,0,0],[0,0,1],[0,0,1]]}}"#,
    );
    let out = symprop(&["propagate", "--config", &skewed]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("state"));
}

#[test]
fn memory_cap_and_io_failures_have_distinct_codes() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "ising.json", ISING_5);
    let out = symprop(&["compare", "--config", &cfg, "--memory-cap", "50"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("memory_cap"));

    let out = symprop(&["propagate", "--config", &cfg, "--output", "/nonexistent-dir/out.csv"]);
    assert_eq!(out.status.code(), Some(4));
    let out = symprop(&["propagate", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn unknown_fields_and_bad_values_are_validation_errors() {
    let dir = TempDir::new().unwrap();
    for (name, json) in [
        (
            "typo.json",
            r#"{"model": {"ising": {"n": 5, "h_x": 1, "h_z": 1, "delta_t": 0.1, "layers": 1}}, "observable": "mid_chain_z", "epsilonn": 0}"#,
        ),
        (
            "eps.json",
            r#"{"model": {"ising": {"n": 5, "h_x": 1, "h_z": 1, "delta_t": 0.1, "layers": 1}}, "observable": "mid_chain_z", "epsilon": -1}"#,
        ),
        (
            "obs.json",
            r#"{"model": {"ising": {"n": 5, "h_x": 1, "h_z": 1, "delta_t": 0.1, "layers": 1}}, "observable": {"pauli": "ZZ"}}"#,
        ),
        (
            "nogroup.json",
            r#"{"model": {"random_symmetric": {"n": 4, "layers": 2, "orbits_per_layer": 1}}, "observable": {"pauli": "ZIII"}}"#,
        ),
    ] {
        let cfg = write_config(&dir, name, json);
        assert_eq!(symprop(&["propagate", "--config", &cfg]).status.code(), Some(2), "{name}");
    }
    let cfg = write_config(
        &dir,
        "ising.json",
        ISING_5.replace("\"symmetry\": \"translation_1d\"", "\"symmetry\": null").as_str(),
    );
    assert_eq!(symprop(&["compare", "--config", &cfg]).status.code(), Some(2));
}

#[test]
fn random_symmetric_model_compares_exactly() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "random.json",
        r#"{"model": {"random_symmetric": {"n": 5, "layers": 6, "orbits_per_layer": 2}},
            "observable": {"terms": [["ZXIIY", 0.5], ["XXIII", -1.0]]},
            "state": {"bloch": [0.3, -0.2, 0.8]},
            "symmetry": "dihedral", "seed": 17}"#,
    );
    let text = stdout(&symprop(&["compare", "--config", &cfg]));
    for line in text.lines().skip(1) {
        let row: Vec<&str> = line.split(',').collect();
        let (a, b): (f64, f64) = (row[3].parse().unwrap(), row[4].parse().unwrap());
        assert!((a - b).abs() <= 1e-10, "{line}");
    }
    assert_eq!(text, stdout(&symprop(&["compare", "--config", &cfg])));
}

#[test]
fn count_reps_tables() {
    let text = stdout(&symprop(&["count-reps", "--group", "translation_1d", "--n", "3", "--n-max", "5"]));
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "n,group,count,ratio");
    assert!(rows[1].starts_with("3,translation_1d,24,"));
    assert_eq!(rows[3].split(',').nth(2), Some("208"));
    assert_eq!(rows[3].split(',').nth(3).unwrap().parse::<f64>().unwrap(), 208.0 / 1024.0);

    let text = stdout(&symprop(&["count-reps", "--group", "permutation_full", "--n", "10"]));
    assert!(text.contains("\n10,permutation_full,286,"));
    let text = stdout(&symprop(&["count-reps", "--group", "trivial", "--n", "2"]));
    assert!(text.contains("\n2,trivial,16,1.0000000000000000e0"));
    let text = stdout(&symprop(&["count-reps", "--group", "translation_2d", "--lx", "3", "--ly", "3"]));
    assert!(text.contains("\n9,translation_2d(3x3),29184,"));
    let text = stdout(&symprop(&["count-reps", "--group", "generic", "--generators", "[[1,2,0]]"]));
    assert!(text.contains("\n3,generic,24,"));

    assert_eq!(symprop(&["count-reps", "--group", "dihedral", "--n", "2"]).status.code(), Some(2));
    assert_eq!(symprop(&["count-reps", "--group", "hexagonal", "--n", "4"]).status.code(), Some(2));
}

#[test]
fn oracle_check_passes_on_small_circuits() {
    let out = symprop(&["oracle-check", "--n-max", "3", "--circuits", "5", "--seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).starts_with("n,mode,circuits,max_abs_error\n"));
    assert_eq!(symprop(&["oracle-check", "--n-max", "11"]).status.code(), Some(2));
}
