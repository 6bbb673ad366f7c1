//! End-to-end tests of the command-line interface.

use std::f64::consts::PI;
use std::process::{Command, Output};

fn qgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgraph"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = qgraph(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8")
}

#[test]
fn symmetry_of_shift_coupling() {
    let text = stdout_of(&[
        "symmetry",
        "--coupling",
        "shift",
        "--n",
        "5",
        "--format",
        "json",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["command"], "symmetry");
    assert_eq!(doc["results"][0]["time_reversal"], serde_json::json!(false));
    assert_eq!(doc["results"][0]["pt_symmetric"], serde_json::json!(true));
    assert!(doc["version"].is_string());
}

#[test]
fn smatrix_high_energy_limit_matrix() {
    let text = stdout_of(&[
        "smatrix",
        "--coupling",
        "shift",
        "--n",
        "3",
        "--negate",
        "--ell",
        "1",
        "--k",
        "1e6",
        "--format",
        "json",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    for entry in doc["results"].as_array().unwrap() {
        let (i, j) = (
            entry["row"].as_i64().unwrap(),
            entry["col"].as_i64().unwrap(),
        );
        let expected = if i == j { 1.0 / 3.0 } else { -2.0 / 3.0 };
        let re = entry["re"].as_f64().unwrap();
        let im = entry["im"].as_f64().unwrap();
        assert!(
            (re - expected).abs() < 1e-5 && im.abs() < 1e-5,
            "entry ({i},{j})"
        );
    }
}

#[test]
fn bands_include_flat_point_at_matching_phase() {
    let mu = (PI - 3.0) / 2.0;
    let text = stdout_of(&[
        "bands",
        "--mu",
        &format!("{mu:.17}"),
        "--ell",
        "1.5",
        "--k-max",
        "20",
        "--format",
        "csv",
    ]);
    assert!(text.starts_with("mu,ell,branch,k_lo,k_hi,edge_lo,edge_hi\n"));
    let flat_row = text
        .lines()
        .find(|line| line.contains(",flat,flat"))
        .expect("flat-band row present");
    assert!(flat_row.contains("1.00000000000e0,1.00000000000e0"));
    // and a slightly detuned phase has no flat row
    let detuned = stdout_of(&[
        "bands", "--mu", "0.08", "--ell", "1.5", "--k-max", "20", "--format", "csv",
    ]);
    assert!(!detuned.contains("flat"));
}

#[test]
fn spectrum_sweep_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("sweep.csv");
    let svg_path = dir.path().join("sweep.svg");
    let mu = (PI - 3.0) / 2.0;
    // a sweep whose first grid point is exactly the resonant phase
    stdout_of(&[
        "bands",
        "--ell",
        "1.5",
        "--k-max",
        "6",
        "--mu-grid",
        "4",
        "--mu-min",
        &format!("{mu:.17}"),
        "--mu-max",
        &format!("{:.17}", mu + 0.2),
        "--grid",
        "150",
        "--output",
        csv_path.to_str().unwrap(),
        "--svg",
        svg_path.to_str().unwrap(),
    ]);
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(
        csv.lines().any(|l| l.contains(",negative,")),
        "negative bands present"
    );
    assert!(
        csv.lines().any(|l| l.contains(",flat,flat")),
        "flat dot at the resonant phase"
    );
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("<rect"));
    assert!(svg.contains("<circle"));
    assert!(!svg.contains("script"));
}

#[test]
fn identical_configs_produce_identical_bytes() {
    let args = [
        "bands", "--mu", "0.5", "--ell", "1.5", "--k-max", "10", "--format", "json",
    ];
    let a = stdout_of(&args);
    let b = stdout_of(&args);
    assert_eq!(a, b);
}

#[test]
fn csv_rows_round_trip_through_json() {
    let base = ["bands", "--mu", "0.5", "--ell", "1.5", "--k-max", "10"];
    let csv = stdout_of(&[&base[..], &["--format", "csv"]].concat());
    let json = stdout_of(&[&base[..], &["--format", "json"]].concat());
    let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
    let results = doc["results"].as_array().unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), results.len());
    for (line, obj) in rows.iter().zip(results) {
        let fields: Vec<&str> = line.split(',').collect();
        // numeric columns agree exactly after the 12-digit rounding
        assert_eq!(
            fields[0].parse::<f64>().unwrap(),
            obj["mu"].as_f64().unwrap()
        );
        assert_eq!(
            fields[3].parse::<f64>().unwrap(),
            obj["k_lo"].as_f64().unwrap()
        );
        assert_eq!(
            fields[4].parse::<f64>().unwrap(),
            obj["k_hi"].as_f64().unwrap()
        );
        assert_eq!(fields[2], obj["branch"].as_str().unwrap());
    }
}

#[test]
fn exit_codes_follow_the_contract() {
    // validation error: unknown coupling
    let out = qgraph(&["symmetry", "--coupling", "nonsense", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
    // validation error: missing required parameter
    let out = qgraph(&["bands", "--ell", "1.5", "--k-max", "5"]);
    assert_eq!(out.status.code(), Some(2));
    // numerical failure: Fermi contour requested in a gap
    let out = qgraph(&["fermi", "--mu", "0.5", "--ell", "1.5", "--k", "2.09"]);
    assert_eq!(out.status.code(), Some(3));
    // clap rejects unknown commands with exit 2
    let out = qgraph(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn custom_coupling_from_json_schema() {
    // the shift matrix fed back in through the documented schema
    let text = stdout_of(&[
        "symmetry",
        "--coupling",
        "custom",
        "--first-row",
        r#"{"n": 3, "first_row": [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]]}"#,
        "--format",
        "json",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["results"][0]["time_reversal"], serde_json::json!(false));
    assert_eq!(doc["results"][0]["pt_symmetric"], serde_json::json!(true));
    // a non-unitary row is a validation error
    let out = qgraph(&[
        "symmetry",
        "--coupling",
        "custom",
        "--first-row",
        "[[1.0, 0.0], [1.0, 0.0]]",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bound_states_table_shape() {
    let text = stdout_of(&[
        "bound-states",
        "--coupling",
        "shift",
        "--n",
        "4",
        "--mu",
        "0.5",
        "--ell",
        "1",
        "--format",
        "csv",
    ]);
    let bound: Vec<&str> = text.lines().filter(|l| l.starts_with("bound,")).collect();
    let anti: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("antibound,"))
        .collect();
    assert_eq!(bound.len(), 2);
    assert_eq!(anti.len(), 2);
    // antibound rows carry no energy
    assert!(anti.iter().all(|l| l.ends_with(',')));
}

#[test]
fn dirac_command_finds_the_gap_closings() {
    let text = stdout_of(&[
        "dirac", "--ell", "10", "--mu-min", "1.545", "--mu-max", "1.556", "--k-min", "9.9",
        "--k-max", "10.6", "--grid", "22", "--format", "csv",
    ]);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2, "{text}");
    assert!(rows[0].ends_with("center"));
    assert!(rows[1].ends_with("corner"));
}

#[test]
fn fermi_csv_schema() {
    let text = stdout_of(&[
        "fermi", "--mu", "0.5", "--ell", "1.5", "--k", "2.8", "--grid", "32", "--format", "csv",
    ]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta1,theta2"));
    let first = lines.next().expect("contour points present");
    assert_eq!(first.split(',').count(), 2);
}
