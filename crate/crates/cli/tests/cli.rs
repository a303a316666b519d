use std::f64::consts::FRAC_PI_2;
use std::path::Path;
use std::process::{Command, Output};

fn oatbell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oatbell"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV written by the tool, keyed by column name.
fn read_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<Option<f64>> {
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i].parse().ok()).collect()
}

const LATTICE4: &[&str] = &[
    "lattice", "--n", "4", "--m-sites", "4", "--v0", "3", "--a-scatter", "0.005", "--boundary", "periodic",
];

#[test]
fn empty_grid_is_a_usage_error_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = oatbell(&["oat", "--n", "8", "--tau-start", "0", "--tau-stop", "1", "--tau-points", "0", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    let o = oatbell(&["oat", "--n", "8", "--tau-list", "0.3,0.2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = oatbell(&["oat", "--n", "8"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn classify_reports() {
    let o = oatbell(&["classify", "--e", "0.13", "--n", "40"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("Bell depth         40"));
    let o = oatbell(&["classify", "--e", "1e-4", "--n", "1000"]);
    assert!(stdout(&o).contains("Bell depth         989"));
    let o = oatbell(&["classify", "--e", "0", "--n", "9"]);
    let text = stdout(&o);
    assert!(text.contains("Bell depth         0"));
    assert!(text.contains("entanglement depth 1"));
    assert_eq!(oatbell(&["classify", "--e", "0.4", "--n", "9"]).status.code(), Some(2));
}

#[test]
fn classify_json() {
    let o = oatbell(&["classify", "--e", "0.01", "--n", "8", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["mode"], "classify");
    assert_eq!(v["rows"][0]["bell_depth"], 4);
    assert_eq!(v["rows"][0]["lhv_bound"].as_f64().unwrap(), 2f64.powi(-8));
}

#[test]
fn lhv_bound_for_small_n() {
    for n in 2..=6 {
        let o = oatbell(&["lhv", "--n", &n.to_string()]);
        assert!(o.status.success());
        assert!(stdout(&o).contains("equal: yes"));
    }
    assert_eq!(oatbell(&["lhv", "--n", "9"]).status.code(), Some(2));
}

#[test]
fn oat_sweep_is_deterministic_across_thread_counts() {
    let args = ["oat", "--n", "64", "--tau-start", "0", "--tau-stop", "1.5", "--tau-points", "61"];
    let a = oatbell(&[&args[..], &["--threads", "1"]].concat());
    let b = oatbell(&[&args[..], &["--threads", "4"]].concat());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("# oatbell oat schema=1 tool="));
    assert!(text.lines().next().unwrap().ends_with("n=64"));
}

#[test]
fn oat_csv_values_round_trip() {
    let o = oatbell(&["oat", "--n", "200", "--tau-list", "0.01,0.3"]);
    let (h, rows) = read_csv(&stdout(&o));
    let e = column(&h, &rows, "correlator_exact");
    assert_eq!(e[1].unwrap(), oatbell::bell_correlator_oat(200, 0.3).unwrap());
}

#[test]
fn n8_sweep_crosses_depth_thresholds_in_order() {
    let o = oatbell(&["oat", "--n", "8", "--tau-start", "0", "--tau-stop", "0.8", "--tau-points", "801"]);
    let (h, rows) = read_csv(&stdout(&o));
    let e = column(&h, &rows, "correlator_exact");
    let first = |t: f64| e.iter().position(|x| x.unwrap() > t).unwrap();
    let (a, b, c) = (first(3.9e-3), first(7.8e-3), first(1.56e-2));
    assert!(a < b && b < c);
    let depth = column(&h, &rows, "bell_depth");
    assert_eq!(depth[a + 1].unwrap(), 3.0);
    assert!(depth[c + 1].unwrap() >= 5.0);
}

#[test]
fn n200_sweep_crossing_and_plateaus() {
    let grid: Vec<String> = (1..=60)
        .map(|i| format!("{}", 0.01 + 0.0002 * i as f64))
        .chain([2usize, 4, 6].iter().map(|q| format!("{}", std::f64::consts::PI / *q as f64)).rev())
        .collect();
    let o = oatbell(&["oat", "--n", "200", "--tau-list", &grid.join(",")]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = read_csv(&stdout(&o));
    let tau = column(&h, &rows, "tau");
    let ln_e = column(&h, &rows, "ln_correlator_exact");
    let ln_bound = -200.0 * std::f64::consts::LN_2;
    let cross = (1..60).find(|&i| ln_e[i].unwrap() > ln_bound && ln_e[i - 1].unwrap() <= ln_bound).unwrap();
    // exact crossing 2.9965 / 200
    assert!((tau[cross].unwrap() - 0.014983).abs() < 3e-4);
    let revival = column(&h, &rows, "revival_prediction");
    let exact = column(&h, &rows, "correlator_exact");
    for i in 60..63 {
        assert!((exact[i].unwrap() / revival[i].unwrap() - 1.0).abs() < 0.01);
    }
}

#[test]
fn output_file_gets_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = oatbell(&["oat", "--n", "8", "--tau-list", "0.1,0.2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let script = std::fs::read_to_string(dir.path().join("s.csv.plot.py")).unwrap();
    assert!(script.contains("matplotlib"));
    assert!(script.contains("\"s.csv\""));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "n = 8\ntau-start = 0.0\ntau-stop = 1.0\ntau-points = 3\nformat = \"json\"\n").unwrap();
    let o = oatbell(&["--config", cfg.to_str().unwrap(), "oat", "--n", "10"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["meta"]["n"], "10");
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    std::fs::write(&cfg, "unknown-key = 1\n").unwrap();
    assert_eq!(oatbell(&["--config", cfg.to_str().unwrap(), "oat"]).status.code(), Some(2));
}

#[test]
fn lattice_tracks_oat_at_half_pi() {
    let o = oatbell(&[LATTICE4, &["--tau-list", &format!("0,0.5,1.0,{FRAC_PI_2}")]].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = read_csv(&stdout(&o));
    let lat = column(&h, &rows, "correlator_lattice");
    let oat = column(&h, &rows, "correlator_oat");
    assert!(lat[0].unwrap() < 1e-10);
    assert!((lat[3].unwrap() / 0.25 - 1.0).abs() < 0.2);
    assert!((lat[2].unwrap() / oat[2].unwrap() - 1.0).abs() < 0.2);
    let norm = column(&h, &rows, "norm");
    assert!(norm.iter().all(|x| (x.unwrap() - 1.0).abs() < 1e-9));
}

#[test]
fn lattice_without_twisting_stays_below_lhv_bound() {
    let o = oatbell(&[LATTICE4, &["--uab-ratio", "1", "--t-start", "0", "--t-stop", "8000", "--t-points", "17"]].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = read_csv(&stdout(&o));
    let bound = 2f64.powi(-4) * (1.0 + 1e-6);
    assert!(column(&h, &rows, "correlator_lattice").iter().all(|x| x.unwrap() <= bound));
    // a tau grid has no meaning at zero twisting
    let o = oatbell(&[LATTICE4, &["--uab-ratio", "1", "--tau-list", "0,1"]].concat());
    assert_eq!(o.status.code(), Some(2));
}

fn run_lattice(out: &Path, extra: &[&str]) -> Output {
    let grid = ["--tau-start", "0", "--tau-stop", "1.2", "--tau-points", "13"];
    oatbell(&[LATTICE4, &grid[..], &["--out", out.to_str().unwrap()], extra].concat())
}

#[test]
fn checkpoint_resume_matches_uninterrupted_run() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full.csv");
    assert!(run_lattice(&full, &[]).status.success());

    let part = dir.path().join("part.csv");
    assert!(run_lattice(&part, &["--checkpoint-every", "5"]).status.success());
    let cp = dir.path().join("part.csv.checkpoint.json");
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&cp).unwrap()).unwrap();
    assert_eq!(doc["format"], "oatbell-lattice-checkpoint");
    assert_eq!(doc["step"], 9);

    let resumed = dir.path().join("resumed.csv");
    let o = run_lattice(&resumed, &["--resume", cp.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let (h, full_rows) = read_csv(&std::fs::read_to_string(&full).unwrap());
    let (_, res_rows) = read_csv(&std::fs::read_to_string(&resumed).unwrap());
    assert_eq!(res_rows.len(), 4);
    let a = column(&h, &full_rows[9..], "correlator_lattice");
    let b = column(&h, &res_rows, "correlator_lattice");
    for (x, y) in a.iter().zip(&b) {
        assert!((x.unwrap() - y.unwrap()).abs() < 1e-9);
    }

    // a checkpoint from another system is refused
    let o = oatbell(&[
        "lattice", "--n", "4", "--m-sites", "4", "--v0", "4", "--boundary", "periodic",
        "--tau-start", "0", "--tau-stop", "1.2", "--tau-points", "13", "--resume", cp.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn compare_reports_both_crossings() {
    let o = oatbell(&[
        "compare", "--n", "4", "--m-sites", "4", "--v0", "3", "--a-scatter", "0.005", "--boundary", "periodic",
        "--tau-points", "21", "--format", "json",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let s = &v["summary"];
    assert!(s["crossing_rel_error"].as_f64().unwrap() < 0.15);
    assert!(s["half_pi_rel_error"].as_f64().unwrap() < 0.2);
    assert_eq!(v["rows"].as_array().unwrap().len(), 21);
}
