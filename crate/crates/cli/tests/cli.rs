use std::process::{Command, Output};

use serde_json::Value;

fn ringrad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ringrad"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = ringrad(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    (
        header,
        lines
            .map(|l| l.split(',').map(String::from).collect())
            .collect(),
    )
}

#[test]
fn correlation_table_default_grid() {
    let (header, rows) = csv(&stdout(&["correlation"]));
    assert_eq!(header, ["x", "D1", "S_exact", "S_approx"]);
    assert_eq!(rows.len(), 300);
    let xs: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(xs.windows(2).all(|w| w[1] > w[0]));
    assert!(rows
        .iter()
        .all(|r| r[2].parse::<f64>().unwrap().is_finite()));
}

#[test]
fn correlation_row_at_pi() {
    let (_, rows) = csv(&stdout(&[
        "correlation",
        "--x-grid",
        "3.141592653589793:3.2:1",
    ]));
    let d1: f64 = rows[0][1].parse().unwrap();
    let want = -3.0 / (2.0 * std::f64::consts::PI.powi(2));
    assert!((d1 - want).abs() < 1e-12);
}

#[test]
fn spectrum_row_counts() {
    let (header, rows) = csv(&stdout(&["spectrum", "--n", "7", "--radius", "0.9"]));
    assert_eq!(header, ["r", "p", "shift", "rate"]);
    assert_eq!(rows.len(), 7);
    let (_, rows) = csv(&stdout(&[
        "spectrum", "--n", "7", "--radius", "0.9", "--center",
    ]));
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[0][1], "0+");
    assert_eq!(rows[1][1], "0-");
}

#[test]
fn centred_spectrum_reports_crossings() {
    let text = stdout(&[
        "spectrum",
        "--n",
        "10",
        "--radius-grid",
        "1:3:0.05",
        "--center",
        "--format",
        "json",
    ]);
    let v: Value = serde_json::from_str(&text).unwrap();
    let crossings = v["crossings"].as_array().unwrap();
    assert!(!crossings.is_empty());
    assert!(crossings
        .iter()
        .all(|c| (1.0..=3.0).contains(&c.as_f64().unwrap())));
    assert_eq!(v["rows"].as_array().unwrap().len(), 41 * 11);
}

#[test]
fn crossings_command_lists_radii() {
    let (header, rows) = csv(&stdout(&[
        "crossings",
        "--n",
        "10",
        "--radius-grid",
        "0.05:3:0.01",
    ]));
    assert_eq!(header, ["N", "index", "r"]);
    let r: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(r[0] > 0.7);
    assert_eq!(r.iter().filter(|&&c| (2.0..=3.0).contains(&c)).count(), 2);
}

#[test]
fn beats_dataset() {
    let (header, rows) = csv(&stdout(&[
        "beats",
        "--n",
        "10,60,100",
        "--radius-grid",
        "2:5:0.5",
    ]));
    assert_eq!(header[..3], ["N", "r", "omega_r"]);
    assert_eq!(rows.len(), 21);
    for r in &rows {
        let a: f64 = r[2].parse().unwrap();
        let b: f64 = r[3].parse().unwrap();
        assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
    }
}

#[test]
fn propagate_from_center() {
    let (header, rows) = csv(&stdout(&[
        "propagate",
        "--n",
        "10,30",
        "--radius",
        "0.45",
        "--t-max",
        "10",
        "--samples",
        "11",
    ]));
    assert_eq!(header, ["N", "t", "P", "P_normalized", "survival"]);
    assert_eq!(rows.len(), 22);
    assert_eq!(rows[0][2], "0");
    assert_eq!(rows[0][4], "1");
}

#[test]
fn propagate_named_and_file_states() {
    let (_, rows) = csv(&stdout(&[
        "propagate",
        "--n",
        "6",
        "--radius",
        "0.3",
        "--initial",
        "p:2",
        "--samples",
        "5",
    ]));
    assert_eq!(rows.len(), 5);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.txt");
    std::fs::write(&path, "# uniform over three sites\n0.5773502691896258,0\n0.5773502691896258 0\n0.5773502691896258\n").unwrap();
    let (_, rows) = csv(&stdout(&[
        "propagate",
        "--n",
        "3",
        "--radius",
        "0.3",
        "--initial",
        path.to_str().unwrap(),
        "--samples",
        "3",
    ]));
    assert_eq!(rows[0][4], "1");
}

#[test]
fn trapscan_outputs() {
    let (header, rows) = csv(&stdout(&["trapscan", "--radii", "1", "--n-max", "40"]));
    assert_eq!(
        header,
        [
            "r",
            "N",
            "nn_exact",
            "nn_approx",
            "p_min",
            "gamma_min",
            "neg_log_gamma_min"
        ]
    );
    assert_eq!(rows.len(), 39);
    let v: Value = serde_json::from_str(&stdout(&["trapscan", "--format", "json"])).unwrap();
    let fits = v["fits"].as_array().unwrap();
    assert_eq!(fits.len(), 4);
    for key in [
        "radius",
        "slope",
        "n_hat",
        "critical_nn",
        "residual_rms",
        "points",
    ] {
        assert!(fits[0].get(key).is_some(), "{key}");
    }
    assert_eq!(v["slopes_strictly_decreasing"], Value::Bool(true));
}

#[test]
fn dump_matrix_format() {
    let text = stdout(&["dump-matrix", "--n", "4", "--radius", "0.5", "--center"]);
    assert_eq!(text.lines().count(), 5);
    for line in text.lines() {
        assert_eq!(line.split(' ').count(), 5);
        assert!(line.split(' ').all(|e| e.split(',').count() == 2));
    }
}

#[test]
fn output_is_deterministic_across_runs_and_threads() {
    let cases: [&[&str]; 3] = [
        &["trapscan", "--format", "json"],
        &["beats", "--n", "10,60", "--radius-grid", "2:3:0.1"],
        &["correlation", "--x-grid", "0.1:5:0.1", "--kernel", "exact"],
    ];
    for args in cases {
        let one = ringrad(&[args, &["--jobs", "1"]].concat()).stdout;
        let many = ringrad(&[args, &["--jobs", "4"]].concat()).stdout;
        let again = ringrad(args).stdout;
        assert!(!one.is_empty());
        assert_eq!(one, many, "{args:?}");
        assert_eq!(one, again, "{args:?}");
    }
}

#[test]
fn out_flag_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scan.cfg");
    let out = dir.path().join("spectrum.csv");
    std::fs::write(&cfg, "n = 5\nradius = 0.4\ncenter = true\n").unwrap();
    let status = ringrad(&[
        "spectrum",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    assert!(status.stdout.is_empty());
    let (_, rows) = csv(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 6);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["spectrum", "--n", "5"][..],
        &["spectrum", "--n", "5", "--radius-grid", "2:1:0.1"],
        &["spectrum", "--n", "1", "--radius", "0.5"],
        &[
            "propagate",
            "--n",
            "5",
            "--radius",
            "0.4",
            "--initial",
            "nonsense",
        ],
        &[
            "propagate",
            "--n",
            "5",
            "--radius",
            "0.4",
            "--initial",
            "p:0",
            "--center",
        ],
        &["trapscan", "--n-max", "1"],
        &["bogus"],
    ] {
        assert_eq!(ringrad(args).status.code(), Some(2), "{args:?}");
    }
}
