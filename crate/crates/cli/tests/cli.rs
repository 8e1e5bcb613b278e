use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_beamsquint"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn design_to(dir: &TempDir, name: &str, extra: &[&str]) -> (Output, std::path::PathBuf) {
    let path = dir.path().join(name);
    let mut args = vec!["design", "--out", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    (run(&args), path)
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn design_from_carrier_and_bandwidth() {
    let dir = TempDir::new().unwrap();
    let (out, path) = design_to(
        &dir,
        "cb.json",
        &["--antennas", "16", "--carrier-ghz", "73", "--bandwidth-ghz", "2.5"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = read_json(&path);
    assert_eq!(doc["size"], 22);
    assert_eq!(doc["beams"].as_array().unwrap().len(), 22);
    assert_eq!(doc["parity"], "even");
    let b = doc["fractional_bandwidth"].as_f64().unwrap();
    assert!((b - 2.5 / 73.0).abs() < 1e-15);
    assert!(stderr(&out).contains("size=22 parity=even N=16 b=0.034247"));
}

#[test]
fn design_without_squint() {
    let dir = TempDir::new().unwrap();
    let (out, path) = design_to(&dir, "cb.json", &["--antennas", "16", "--fractional-bandwidth", "0"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(read_json(&path)["size"], 19);
}

#[test]
fn design_beyond_bandwidth_bound_is_infeasible() {
    let dir = TempDir::new().unwrap();
    let (out, path) =
        design_to(&dir, "cb.json", &["--antennas", "16", "--fractional-bandwidth", "0.2"]);
    assert_eq!(out.status.code(), Some(3));
    let msg = stderr(&out);
    assert_eq!(msg.lines().count(), 1);
    assert!(msg.starts_with("error: infeasible:"), "{msg}");
    assert!(msg.contains("max_b=0.110750"), "{msg}");
    assert!(!path.exists());
}

#[test]
fn design_csv_lists_beams() {
    let out = run(&[
        "design",
        "--antennas",
        "16",
        "--fractional-bandwidth",
        "0.0342",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("index,psi0,theta0_deg,lo,hi\n"));
    assert_eq!(csv_rows(&text).len(), 22);
}

#[test]
fn verify_accepts_fresh_design() {
    let dir = TempDir::new().unwrap();
    let (_, cb) = design_to(&dir, "cb.json", &["--antennas", "16", "--fractional-bandwidth", "0.0342"]);
    let report = dir.path().join("report.json");
    let out = run(&[
        "verify",
        "--codebook",
        cb.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = read_json(&report);
    assert_eq!(doc["pass"], true);
    assert!(doc["worst_gain_db"].as_f64().unwrap() >= -3.2);
    assert!(doc["gaps"].as_array().unwrap().is_empty());
}

#[test]
fn verify_reports_gap_after_beam_removed() {
    let dir = TempDir::new().unwrap();
    let (_, cb) = design_to(&dir, "cb.json", &["--antennas", "32", "--fractional-bandwidth", "0.0342"]);
    let mut doc = read_json(&cb);
    let beams = doc["beams"].as_array_mut().unwrap();
    let mid = beams
        .iter()
        .position(|b| b["psi0"].as_f64().unwrap() == 0.0)
        .expect("odd codebook has a broadside beam");
    beams.remove(mid);
    std::fs::write(&cb, serde_json::to_string(&doc).unwrap()).unwrap();

    let out = run(&["verify", "--codebook", cb.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["pass"], false);
    let gaps = report["gaps"].as_array().unwrap();
    assert_eq!(gaps.len(), 1);
    assert!(gaps[0]["lo"].as_f64().unwrap() < 0.0 && gaps[0]["hi"].as_f64().unwrap() > 0.0);
    assert!(stderr(&out).starts_with("error: verify-failed:"));
}

#[test]
fn verify_rejects_wrong_phase_count() {
    let dir = TempDir::new().unwrap();
    let (_, cb) = design_to(&dir, "cb.json", &["--antennas", "16", "--fractional-bandwidth", "0.0342"]);
    let mut doc = read_json(&cb);
    doc["beams"][3]["phases_rad"].as_array_mut().unwrap().pop();
    std::fs::write(&cb, serde_json::to_string(&doc).unwrap()).unwrap();

    let out = run(&["verify", "--codebook", cb.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error: invalid-config:"));
}

#[test]
fn verify_missing_file_is_io_error() {
    let out = run(&["verify", "--codebook", "/nonexistent/cb.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_configs_exit_2_with_one_line() {
    let cases: &[&[&str]] = &[
        &["design", "--antennas", "16"],
        &["design", "--antennas", "1", "--fractional-bandwidth", "0"],
        &["design", "--antennas", "x", "--fractional-bandwidth", "0"],
        &["design", "--antennas", "16", "--fractional-bandwidth", "-0.1"],
        &["design", "--antennas", "16", "--fractional-bandwidth", "0", "--psi-max", "1.5"],
        &[
            "design",
            "--antennas",
            "16",
            "--fractional-bandwidth",
            "0.01",
            "--carrier-ghz",
            "73",
            "--bandwidth-ghz",
            "1",
        ],
        &["pattern", "--antennas", "16", "--focus-deg", "0", "--freqs-ghz", "73"],
        &["frobnicate"],
    ];
    for args in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
        let msg = stderr(&out);
        assert_eq!(msg.trim_end().lines().count(), 1, "{args:?}: {msg}");
        assert!(msg.starts_with("error: invalid-config:"), "{args:?}: {msg}");
    }
}

#[test]
fn pattern_header_and_peak() {
    let out = run(&[
        "pattern",
        "--antennas",
        "16",
        "--focus-deg",
        "30",
        "--xi",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("psi,theta_deg,xi,gain_abs,gain_db\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 2001);
    let peak = rows
        .iter()
        .max_by(|a, b| {
            a[3].parse::<f64>().unwrap().total_cmp(&b[3].parse::<f64>().unwrap())
        })
        .unwrap();
    assert!((peak[0].parse::<f64>().unwrap() - 0.5).abs() < 1e-9);
    assert!((peak[3].parse::<f64>().unwrap() - 4.0).abs() < 1e-9);
}

#[test]
fn pattern_grids_agree_on_shared_points() {
    let coarse = run(&[
        "pattern", "--antennas", "16", "--focus-psi", "0.3", "--xi", "0.98,1.02", "--psi-step", "1e-3",
    ]);
    let fine = run(&[
        "pattern", "--antennas", "16", "--focus-psi", "0.3", "--xi", "0.98,1.02", "--psi-step", "1e-4",
    ]);
    let coarse = csv_rows(&stdout(&coarse));
    let fine = csv_rows(&stdout(&fine));
    let index: std::collections::HashMap<(String, String), String> = fine
        .into_iter()
        .map(|r| ((r[0].clone(), r[2].clone()), r[3].clone()))
        .collect();
    let mut shared = 0;
    for r in &coarse {
        if let Some(g) = index.get(&(r[0].clone(), r[2].clone())) {
            assert_eq!(g, &r[3]);
            shared += 1;
        }
    }
    assert_eq!(shared, coarse.len());
}

#[test]
fn pattern_peaks_squint_with_frequency() {
    let out = run(&[
        "pattern",
        "--antennas",
        "32",
        "--focus-deg",
        "60",
        "--carrier-ghz",
        "73",
        "--freqs-ghz",
        "65.7,73,80.2",
        "--psi-step",
        "1e-4",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rows = csv_rows(&stdout(&out));
    let psi0 = 60f64.to_radians().sin();
    for f in [65.7, 73.0, 80.2] {
        let xi = f / 73.0;
        let peak = rows
            .iter()
            .filter(|r| (r[2].parse::<f64>().unwrap() - xi).abs() < 1e-12)
            .max_by(|a, b| a[3].parse::<f64>().unwrap().total_cmp(&b[3].parse::<f64>().unwrap()))
            .unwrap();
        let at = peak[0].parse::<f64>().unwrap();
        let expected = (psi0 / xi).min(1.0);
        assert!((at - expected).abs() < 2e-4, "f={f}: peak at {at}, expected {expected}");
    }
}

#[test]
fn sweep_n_stops_at_antenna_bound() {
    let out = run(&["sweep-n", "--fractional-bandwidth", "0.0714"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("axis,value_or_status,bound\n"));
    let rows = csv_rows(&text);
    let last_feasible = rows
        .iter()
        .filter(|r| r[1] != "INFEASIBLE")
        .map(|r| r[0].parse::<usize>().unwrap())
        .max()
        .unwrap();
    assert_eq!(last_feasible, 24);
    assert!(rows
        .iter()
        .filter(|r| r[0].parse::<usize>().unwrap() > 24)
        .all(|r| r[1] == "INFEASIBLE"));
}

#[test]
fn sweep_b_reference_sizes() {
    let out = run(&["sweep-b", "--antennas", "16", "--b-grid", "0,0.0342"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows[0][1], "19");
    assert_eq!(rows[1][1], "22");
}

#[test]
fn sweep_b_above_bound_is_all_infeasible() {
    let out = run(&["sweep-b", "--antennas", "16", "--b-grid", "0.12,0.2,0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r[1] == "INFEASIBLE"));
}

#[test]
fn bounds_json() {
    let out = run(&[
        "bounds",
        "--antennas",
        "16",
        "--fractional-bandwidth",
        "0.0342",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let text = doc.to_string();
    assert!(text.contains("0.11075"), "{text}");
    assert!(text.contains("51"), "{text}");
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let args = ["--antennas", "24", "--fractional-bandwidth", "0.0714"];
    let (_, a) = design_to(&dir, "a.json", &args);
    let (_, b) = design_to(&dir, "b.json", &args);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let r1 = run(&["verify", "--codebook", a.to_str().unwrap()]);
    let r2 = run(&["verify", "--codebook", a.to_str().unwrap()]);
    assert_eq!(r1.stdout, r2.stdout);

    let s1 = run(&["sweep-n"]);
    let s2 = run(&["sweep-n"]);
    assert_eq!(s1.stdout, s2.stdout);
}

#[test]
fn design_verify_round_trip_matrix() {
    let dir = TempDir::new().unwrap();
    for n in [8usize, 16, 32] {
        for b in [0.0, 0.0179, 0.0342, 0.0714] {
            let name = format!("cb_{n}_{b}.json");
            let (out, cb) = design_to(
                &dir,
                &name,
                &["--antennas", &n.to_string(), "--fractional-bandwidth", &b.to_string()],
            );
            if b * n as f64 >= 1.772 {
                assert_eq!(out.status.code(), Some(3), "N={n} b={b}");
                continue;
            }
            assert_eq!(out.status.code(), Some(0), "N={n} b={b}: {}", stderr(&out));
            let out = run(&["verify", "--codebook", cb.to_str().unwrap(), "--psi-step", "1e-3"]);
            assert_eq!(out.status.code(), Some(0), "N={n} b={b}: {}", stderr(&out));
        }
    }
}
