use serde_json::Value;
use shrinker_cli::{run_command, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};

fn run(args: &[&str]) -> (i32, Value) {
    let mut argv = vec!["shrinker"];
    argv.extend_from_slice(args);
    let out = run_command(argv);
    (out.exit_code, out.report_json().unwrap_or(Value::Null))
}

#[test]
fn check_torus_passes() {
    let (code, r) = run(&["check", "--shape", "clifford-torus", "--n", "2"]);
    assert_eq!(code, EXIT_PASS);
    let res = &r["result"]["shrinker_residual"];
    assert!(res["value"].as_f64().unwrap() <= 1e-10);
    assert_eq!(res["tol"].as_f64().unwrap(), 1e-10);
    assert_eq!(r["tool"]["name"], "shrinker");
    assert_eq!(r["config"]["shape"], "clifford-torus");
}

#[test]
fn check_rejects_wrong_radius() {
    let (code, r) = run(&["check", "--shape", "clifford-torus", "--radius", "1"]);
    assert_eq!(code, EXIT_FAIL);
    assert_eq!(r["pass"], false);
}

#[test]
fn lagrangian_torus_reports_witness() {
    let (code, r) = run(&[
        "stability", "--shape", "clifford-torus", "--mode", "lagrangian", "--res", "1=24", "--res", "2=24",
    ]);
    assert_eq!(code, EXIT_FAIL);
    assert_eq!(r["result"]["outcome"], "unstable");
    assert_eq!(r["result"]["witness"]["label"], "nu3 - nu4");
}

#[test]
fn cylinder_spectrum_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("out.csv");
    let p = csv_path.to_str().unwrap();
    let (code, r) = run(&["spectrum", "--shape", "cylinder", "--count", "12", "--csv", p]);
    assert_eq!(code, EXIT_PASS);
    assert_eq!(r["result"]["verdict"]["hamiltonian_f_stable"], true);
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["index", "eigenvalue", "cluster"]);
    let rows: Vec<(usize, f64, usize)> = reader
        .records()
        .map(|rec| {
            let rec = rec.unwrap();
            (rec[0].parse().unwrap(), rec[1].parse().unwrap(), rec[2].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 12);
    assert_eq!((rows[0].0, rows[0].2), (0, 0));
    assert!(rows[0].1.abs() < 1e-10);
    assert!((rows[1].1 - 0.5).abs() < 1e-10 && rows[1].2 == 1);
}

#[test]
fn torus_spectrum_lambda_one() {
    let (code, r) = run(&["spectrum", "--shape", "clifford-torus", "--res", "1=32", "--res", "2=32"]);
    assert_eq!(code, EXIT_PASS);
    assert!((r["result"]["lambda_1"].as_f64().unwrap() - 0.5).abs() < 1e-8);
    assert_eq!(r["result"]["verdict"]["id"], "hamiltonian_f_stable");
}

#[test]
fn second_variation_of_harmonic_pair() {
    let (code, r) = run(&[
        "second-variation", "--shape", "clifford-torus", "--field", "nu3-nu4", "--res", "1=32", "--res", "2=32",
    ]);
    assert_eq!(code, EXIT_FAIL);
    let sup = r["result"]["optimum"]["sup"].as_f64().unwrap();
    assert!((sup + 4.0 * std::f64::consts::PI / std::f64::consts::E).abs() < 1e-9);

    let (code, _) = run(&[
        "second-variation", "--shape", "clifford-torus", "--field", "jgrad:cos1", "--res", "1=32", "--res", "2=32",
    ]);
    assert_eq!(code, EXIT_PASS);
}

#[test]
fn witness_dump_has_one_row_per_node() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("w.csv");
    let p = csv_path.to_str().unwrap();
    let (code, _) = run(&[
        "stability", "--shape", "clifford-torus", "--mode", "lagrangian", "--res", "1=8", "--res", "2=8",
        "--trials", "3", "--csv", p,
    ]);
    assert_eq!(code, EXIT_FAIL);
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(reader.headers().unwrap().len(), 2 + 2 + 4 + 4);
    assert_eq!(reader.records().count(), 64);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["check", "--shape", "sphere"][..],
        &["check"][..],
        &["frobnicate", "--shape", "plane"][..],
        &["check", "--shape", "cylinder", "--n", "2", "--k", "2"][..],
        &["check", "--shape", "plane", "--tol", "nonsense=1"][..],
        &["stability", "--shape", "plane", "--mode", "lagrangian", "--res", "1=8", "--res", "2=8"][..],
        &["second-variation", "--shape", "clifford-torus"][..],
        &["second-variation", "--shape", "clifford-torus", "--field", "nu9"][..],
        &["spectrum", "--shape", "clifford-torus", "--res", "1=6"][..],
    ] {
        let (code, r) = run(args);
        assert_eq!(code, EXIT_USAGE, "{args:?}");
        assert!(r.is_null(), "{args:?}");
    }
}

#[test]
fn tolerance_override_flips_result() {
    let (code, r) = run(&["check", "--shape", "cylinder", "--tol", "shrinker_residual=0"]);
    assert_eq!(r["config"]["tolerances"]["shrinker_residual"].as_f64(), Some(0.0));
    let value = r["result"]["shrinker_residual"]["value"].as_f64().unwrap();
    assert_eq!(code, if value == 0.0 { EXIT_PASS } else { EXIT_FAIL });
}

#[test]
fn same_config_same_bytes() {
    let args = ["shrinker", "identities", "--shape", "cylinder", "--res", "1=16", "--res", "2=16"];
    let a = run_command(args).report.unwrap();
    let b = run_command(args).report.unwrap();
    assert_eq!(a, b);
    let c = run_command(["shrinker", "identities", "--shape", "cylinder", "--res", "1=16", "--res", "2=16", "--seed", "7"])
        .report
        .unwrap();
    assert_ne!(a, c);
}
