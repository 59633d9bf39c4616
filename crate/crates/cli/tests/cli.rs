//! End-to-end tests of the `aoi-power` binary: output schemas, round-trips,
//! byte determinism, and config-file handling.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aoi-power"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// `# key = value` comment headers of a CSV output.
fn header_value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    let prefix = format!("# {key} = ");
    text.lines()
        .take_while(|l| l.starts_with('#'))
        .find_map(|l| l.strip_prefix(prefix.as_str()))
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .collect()
}

#[test]
fn evaluate_constant_policy_matches_closed_form() {
    let text = run_ok(&["evaluate", "--pbar-dbw", "0", "--states", "200"]);
    let lines = data_lines(&text);
    assert_eq!(lines[0], "aoi,average_power_w");
    let fields: Vec<&str> = lines[1].split(',').collect();
    let aoi: f64 = fields[0].parse().unwrap();
    let power: f64 = fields[1].parse().unwrap();
    // p = 1 - e^{-1} at 0 dBW, R = 1: aoi = (3 - p) / (2 (1 - p))
    assert!((aoi - 3.218_281_828_459_045).abs() < 1e-9, "aoi {aoi}");
    assert!((power - 1.0).abs() < 1e-9);
    assert_eq!(header_value(&text, "command"), Some("evaluate"));
    assert_eq!(header_value(&text, "states"), Some("200"));
}

#[test]
fn exported_policy_reingests_to_the_reported_aoi() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["csv", "json"] {
        let path = dir.path().join(format!("policy.{format}"));
        let path = path.to_str().unwrap();
        run_ok(&[
            "optimize-sa",
            "--pbar-dbw",
            "-6",
            "--states",
            "12",
            "--tmin",
            "0.2",
            "--candidates",
            "30",
            "--seed",
            "5",
            "--format",
            format,
            "--out",
            path,
        ]);
        let text = std::fs::read_to_string(path).unwrap();
        let reported: f64 = match format {
            "csv" => header_value(&text, "aoi").unwrap().parse().unwrap(),
            _ => serde_json::from_str::<serde_json::Value>(&text).unwrap()["summary"]["aoi"]
                .as_f64()
                .unwrap(),
        };
        let eval = run_ok(&["evaluate", "--policy", path]);
        let line = data_lines(&eval)[1].to_string();
        let aoi: f64 = line.split(',').next().unwrap().parse().unwrap();
        assert!(
            (aoi - reported).abs() <= 1e-9 * reported,
            "{format}: re-ingested {aoi} vs exported {reported}"
        );
    }
}

#[test]
fn identical_runs_produce_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |out: &Path| {
        vec![
            "optimize-sa".to_string(),
            "--pbar-dbw".into(),
            "-6".into(),
            "--states".into(),
            "10".into(),
            "--tmin".into(),
            "0.25".into(),
            "--candidates".into(),
            "20".into(),
            "--seed".into(),
            "11".into(),
            "--out".into(),
            out.display().to_string(),
        ]
    };
    fn to_refs(v: &[String]) -> Vec<&str> {
        v.iter().map(String::as_str).collect()
    }
    run_ok(&to_refs(&args(&a)));
    run_ok(&to_refs(&args(&b)));
    assert_eq!(
        std::fs::read(&a).unwrap(),
        std::fs::read(&b).unwrap(),
        "same seed must give identical files"
    );

    let c = dir.path().join("c.csv");
    let mut other = args(&c);
    let seed_pos = other.iter().position(|s| s == "11").unwrap();
    other[seed_pos] = "12".into();
    run_ok(&to_refs(&other));
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn forced_tau_exports_leading_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("onoff.csv");
    let path = path.to_str().unwrap();
    run_ok(&[
        "optimize-onoff",
        "--pbar-dbw",
        "-6",
        "--states",
        "20",
        "--tau",
        "7",
        "--out",
        path,
    ]);
    let text = std::fs::read_to_string(path).unwrap();
    let lines = data_lines(&text);
    assert_eq!(lines[0], "state,power_w,eps,pi");
    assert_eq!(lines.len(), 21);
    for (m, line) in lines[1..].iter().enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[0].parse::<usize>().unwrap(), m);
        let power: f64 = fields[1].parse().unwrap();
        let eps: f64 = fields[2].parse().unwrap();
        if m < 7 {
            assert_eq!(power, 0.0, "state {m} should be silent");
            assert_eq!(eps, 1.0);
        } else {
            assert!(power > 0.0);
        }
    }
}

#[test]
fn constant_policy_export_has_equal_powers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("const.csv");
    let path = path.to_str().unwrap();
    run_ok(&[
        "optimize-onoff",
        "--pbar-dbw",
        "10",
        "--states",
        "15",
        "--tau",
        "0",
        "--out",
        path,
    ]);
    let text = std::fs::read_to_string(path).unwrap();
    let powers: Vec<&str> = data_lines(&text)[1..]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(powers.len(), 15);
    assert!(powers.iter().all(|&p| p == powers[0]));
}

#[test]
fn sweep_schema_with_and_without_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let base = [
        "sweep",
        "--pbar-grid-dbw",
        "-3,10",
        "--states",
        "10",
        "--tmin",
        "0.5",
        "--candidates",
        "10",
        "--seed",
        "3",
    ];

    let plain = dir.path().join("plain.csv");
    let mut args = base.to_vec();
    args.extend(["--out", plain.to_str().unwrap()]);
    run_ok(&args);
    let text = std::fs::read_to_string(&plain).unwrap();
    let lines = data_lines(&text);
    assert_eq!(lines[0], "pbar_dbw,aoi_const,aoi_onoff,aoi_sa,error");
    assert_eq!(lines.len(), 3);
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 5);
        assert_eq!(fields[4], "", "error column should be empty: {line}");
        for f in &fields[..4] {
            f.parse::<f64>().expect("numeric cell");
        }
    }

    let sim = dir.path().join("sim.csv");
    let mut args = base.to_vec();
    args.extend([
        "--simulate",
        "--slots",
        "20000",
        "--out",
        sim.to_str().unwrap(),
    ]);
    run_ok(&args);
    let text = std::fs::read_to_string(&sim).unwrap();
    let lines = data_lines(&text);
    assert_eq!(
        lines[0],
        "pbar_dbw,aoi_const,aoi_onoff,aoi_sa,aoi_sim_sa,ci_halfwidth,error"
    );
    for line in &lines[1..] {
        assert_eq!(line.split(',').count(), 7);
    }

    // analytic columns are untouched by the simulation flag
    let plain_rows = data_lines(&std::fs::read_to_string(&plain).unwrap())
        .iter()
        .skip(1)
        .map(|l| l.split(',').take(4).map(str::to_string).collect::<Vec<_>>())
        .collect::<Vec<_>>();
    let sim_rows = data_lines(&text)
        .iter()
        .skip(1)
        .map(|l| l.split(',').take(4).map(str::to_string).collect::<Vec<_>>())
        .collect::<Vec<_>>();
    assert_eq!(plain_rows, sim_rows);
}

#[test]
fn sweep_rejects_a_non_increasing_grid() {
    let out = run(&["sweep", "--pbar-grid-dbw", "0,-3", "--states", "8"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("strictly increasing"), "stderr: {err}");
}

#[test]
fn sweep_json_mirrors_the_table() {
    let text = run_ok(&[
        "sweep",
        "--pbar-grid-dbw",
        "0,10",
        "--states",
        "8",
        "--tmin",
        "0.5",
        "--candidates",
        "5",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["manifest"]["command"], "sweep");
    assert_eq!(v["manifest"]["seed"], 1.0);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["pbar_dbw"].as_f64(), Some(0.0));
    assert!(rows[0]["aoi_sa"].as_f64().unwrap() >= 1.5);
    assert!(rows[0].get("error").is_none());
    // at 10 W every policy sits near the 1.5 lower bound
    for key in ["aoi_const", "aoi_onoff", "aoi_sa"] {
        let v = rows[1][key].as_f64().unwrap();
        assert!((1.5..=1.65).contains(&v), "{key} = {v}");
    }
}

#[test]
fn config_file_is_used_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(&cfg, "states = 8\npbar_dbw = 0.0\nseed = 9\n").unwrap();

    let text = run_ok(&["evaluate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(header_value(&text, "states"), Some("8"));
    assert_eq!(header_value(&text, "seed"), Some("9"));
    assert_eq!(header_value(&text, "pbar_dbw"), Some("0"));

    let text = run_ok(&[
        "evaluate",
        "--config",
        cfg.to_str().unwrap(),
        "--states",
        "16",
    ]);
    assert_eq!(header_value(&text, "states"), Some("16"));
    assert_eq!(header_value(&text, "seed"), Some("9"));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "sates = 8\n").unwrap();
    let out = run(&[
        "evaluate",
        "--pbar-dbw",
        "0",
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert!(!out.status.success());
}

#[test]
fn simulate_reports_match_the_analytic_age() {
    let text = run_ok(&[
        "simulate",
        "--pbar-dbw",
        "0",
        "--states",
        "30",
        "--slots",
        "200000",
        "--seed",
        "4",
    ]);
    let lines = data_lines(&text);
    assert_eq!(
        lines[0],
        "aoi_sim,aoi_analytic,cycles,average_power_w,ci_halfwidth"
    );
    let fields: Vec<f64> = lines[1].split(',').map(|f| f.parse().unwrap()).collect();
    let (sim, analytic) = (fields[0], fields[1]);
    assert!(
        (sim - analytic).abs() < 0.05 * analytic,
        "{sim} vs {analytic}"
    );
}
