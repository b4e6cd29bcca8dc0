use std::process::{Command, Output};

use serde_json::Value;
use waybell_core::io::CurveTable;

fn waybell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_waybell"))
        .args(args)
        .env_remove("WAYBELL_THREADS")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = waybell(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn exit_codes_per_subcommand() {
    let cases: &[(&[&str], i32)] = &[
        (&["curve", "--theta-points", "9"], 0),
        (&["curve", "--theta-points", "1"], 2),
        (&["curve", "--delta-l", "0.1"], 3),
        (&["curve", "--state", "nonsense"], 2),
        (&["chsh"], 0),
        (&["chsh", "--settings", "1,2,3"], 2),
        (&["chsh", "--model", "way_singlet", "--delta-l", "0.3"], 3),
        (&["scan", "--model", "base"], 0),
        (&["scan", "--model", "nope"], 2),
        (&["fit", "--objective", "min_mean_abs"], 0),
        (&["fit", "--objective", "eyeball"], 2),
        (&["fit", "--theta-points", "10"], 2),
        (&["mc", "--samples", "2000"], 0),
        (&["mc", "--theta", "4"], 3),
        (&["mc", "--samples", "0"], 2),
        (&["bound", "--theta", "1"], 0),
        (&["bound", "--delta-l", "-1"], 3),
        (&["single", "--theta", "0.5"], 0),
        (&["single", "--theta", "5"], 3),
        (&["single", "--format", "xml"], 2),
        (&["mc", "--format", "csv"], 2),
        (&["frobnicate"], 2),
        (&["curve", "--out", "/nonexistent-dir/x.csv"], 4),
        (&["curve", "--config", "/nonexistent-dir/c.toml"], 4),
    ];
    for (args, code) in cases {
        let out = waybell(args);
        assert_eq!(out.status.code(), Some(*code), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn curve_rows_match_closed_forms() {
    let out = waybell(&["curve", "--theta-points", "33", "--delta-l", "0.77"]);
    let table = CurveTable::from_csv(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(table.columns, ["theta", "E_qm", "E_base", "E_way_singlet_dL0.77"]);
    assert_eq!(&table.rows[0][1..], &[-1.0, -1.0, -1.0]);
    let eighth = &table.rows[2];
    assert_eq!(eighth[1], -0.923879532511);
    assert!((eighth[3] + 0.8909).abs() < 1e-4);
    for v in &table.rows[8][1..] {
        assert!(v.abs() < 1e-12);
    }
}

#[test]
fn chsh_reports() {
    let q = json(&["chsh"]);
    assert_eq!(q["s_value"].as_f64().unwrap(), 2.82842712475);
    assert_eq!(q["classification"], "quantum");
    assert_eq!(q["reference"]["storz_2023"].as_f64().unwrap(), 2.0747);
    let w = json(&["chsh", "--model", "way_singlet", "--delta-l", "0.5"]);
    assert!((w["s_value"].as_f64().unwrap() - 3.637).abs() < 1e-3);
    assert_eq!(w["classification"], "supra-quantum");
    let b = json(&["chsh", "--model", "base"]);
    assert_eq!(b["s_value"].as_f64().unwrap(), 2.0);
    assert_eq!(b["classification"], "classical");
}

#[test]
fn mc_fit_bound_single_reports() {
    let m = json(&["mc", "--model", "base", "--theta", "1.5707963267948966", "--seed", "42"]);
    assert!(m["mean"].as_f64().unwrap().abs() <= 4.0 * m["std_error"].as_f64().unwrap());
    let z = json(&["mc", "--theta", "0"]);
    assert_eq!(z["n_rejected"].as_u64().unwrap(), 0);

    let f = json(&["fit"]);
    assert!((0.74..=0.80).contains(&f["delta_l_star"].as_f64().unwrap()));
    assert!((f["max_abs_error"].as_f64().unwrap() - 0.03).abs() < 0.005);

    let b = json(&["bound", "--theta", "1.5707963267948966", "--delta-l", "0.5"]);
    assert_eq!(b["rows"][0][1].as_f64().unwrap(), 1.0);
    assert!(b["rows"][0][3].as_f64().unwrap() <= 1e-10);

    let s = json(&["single", "--theta", "0.7853981633974483"]);
    assert!((s["rows"][0][1].as_f64().unwrap() - 0.768468).abs() < 1e-6);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "model = \"way_singlet\"\ndelta_l = [0.5]\n").unwrap();
    let from_file = json(&["chsh", "--config", cfg.to_str().unwrap()]);
    assert_eq!(from_file["delta_l"].as_f64().unwrap(), 0.5);
    let overridden = json(&["chsh", "--config", cfg.to_str().unwrap(), "--delta-l", "0.77"]);
    assert_eq!(overridden["delta_l"].as_f64().unwrap(), 0.77);

    std::fs::write(&cfg, "colour = \"blue\"\n").unwrap();
    assert_eq!(waybell(&["chsh", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn json_and_csv_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("c.csv");
    let js = dir.path().join("c.json");
    let csv_s = csv.to_str().unwrap();
    let js_s = js.to_str().unwrap();
    assert!(waybell(&["curve", "--theta-points", "50", "--out", csv_s]).status.success());
    assert!(waybell(&["curve", "--theta-points", "50", "--format", "json", "--out", js_s, "--meta"])
        .status
        .success());
    let a = CurveTable::from_csv(&std::fs::read_to_string(&csv).unwrap()).unwrap();
    let b = CurveTable::from_json(&std::fs::read_to_string(&js).unwrap()).unwrap();
    assert_eq!(a, b);
    let direct = waybell_core::io::curve_table(
        &[waybell_core::StateKind::Singlet],
        &waybell_core::io::DEFAULT_CURVE_DELTA_LS,
        50,
    )
    .unwrap();
    assert_eq!(a, direct.rounded());
    assert!(dir.path().join("c.json.meta.json").exists());
}
