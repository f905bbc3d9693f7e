use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_archimedean")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

#[test]
fn mk_table_rows_agree() {
    let o = run(&["mk-table", "--k-min", "2", "--k-max", "8"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,m_k_quadrature,m_k_closed_form,abs_diff"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 7);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[0], (i + 2) as f64);
        assert!(row[3] <= 1e-10, "{row:?}");
        assert_eq!(row[3], (row[1] - row[2]).abs());
    }
}

#[test]
fn volume_of_round_sphere() {
    let o = run(&["volume", "--n", "3", "--k", "2", "--r", "1"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "volume");
    let four_pi = 4.0 * std::f64::consts::PI;
    assert!((v["closed_form"].as_f64().unwrap() - four_pi).abs() <= 1e-14 * four_pi);
    assert!(v["relative_difference"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn volume_enclosed_equizonal() {
    let o = run(&["volume", "--n", "3", "--k", "2", "--r", "2", "--enclosed", "--samples", "20000"]);
    assert!(o.status.success());
    let e = &json(&o)["enclosed"];
    let ball = 4.0 * std::f64::consts::PI * 8.0 / 3.0;
    assert!((e["closed_form"].as_f64().unwrap() - ball).abs() <= 1e-12 * ball);
    assert!(e["relative_difference"].as_f64().unwrap() <= 1e-4);
    assert_eq!(e["monte_carlo_samples"], 20000);
}

#[test]
fn residual_verification_passes() {
    let o = run(&["verify", "--n", "4", "--k", "3", "--r", "1", "--mode", "residual"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["passed"], true);
    assert_eq!(v["report"]["points"], 10000);
}

#[test]
fn failed_gate_exits_one() {
    let o = run(&["verify", "--n", "3", "--k", "2", "--mode", "residual", "--tolerance", "1e-300"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["passed"], false);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["bogus"][..],
        &["verify", "--n", "4"],
        &["verify", "--n", "4", "--k", "3"],
        &["verify", "--n", "4", "--k", "3", "--mode", "sideways"],
        &["volume", "--n", "3", "--k", "3"],
        &["mk-table", "--k-min", "1"],
        &["mesh", "--n", "6", "--k", "2"],
        &["sample", "--n", "3", "--k", "2", "--threads", "0"],
        &["verify", "--n", "3", "--k", "2", "--mode", "statistical", "--tolerance", "1"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn config_file_supplies_flags_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"n": 3, "k": 2, "r": 3.0, "threads": 2}"#).unwrap();
    let c = cfg.to_str().unwrap();
    let from_file = json(&run(&["--config", c, "volume"]));
    assert_eq!(from_file["r"], 3.0);
    let overridden = json(&run(&["--config", c, "volume", "--r", "0.5"]));
    assert_eq!(overridden["r"], 0.5);
    assert_eq!(overridden["n"], 3);

    fs::write(&cfg, r#"{"n": 3, "k": 2, "colour": "red"}"#).unwrap();
    assert_eq!(run(&["--config", c, "volume"]).status.code(), Some(2));
    fs::write(&cfg, "[1, 2]").unwrap();
    assert_eq!(run(&["--config", c, "volume"]).status.code(), Some(2));
}

#[test]
fn outputs_are_byte_reproducible_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (i, threads) in ["1", "3", "1"].iter().enumerate() {
        let path = dir.path().join(format!("s{i}.csv"));
        let o = run(&[
            "--threads",
            threads,
            "sample",
            "--n",
            "4",
            "--k",
            "2",
            "--count",
            "300",
            "--seed",
            "9",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        files.push(fs::read(&path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    assert_eq!(files[0], files[2]);
    let text = String::from_utf8(files[0].clone()).unwrap();
    assert!(text.starts_with("x1,x2,x3,x4\n"));
    assert_eq!(text.lines().count(), 301);

    let stat = |threads: &str| {
        stdout(&run(&[
            "--threads",
            threads,
            "verify",
            "--n",
            "3",
            "--k",
            "2",
            "--mode",
            "statistical",
            "--samples",
            "20000",
            "--regions",
            "5",
            "--seed",
            "4",
        ]))
    };
    assert_eq!(stat("1"), stat("4"));
}

#[test]
fn sampled_points_lie_on_sphere() {
    let o = run(&["sample", "--n", "5", "--k", "2", "--count", "200", "--seed", "1"]);
    for line in stdout(&o).lines().skip(1) {
        let norm: f64 = line.split(',').map(|c| c.parse::<f64>().unwrap().powi(2)).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn scaling_profile_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f3.csv");
    let o = run(&["scaling", "--k", "3", "--samples", "65", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = fs::read_to_string(&path).unwrap();
    let rows: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let (x, y) = l.split_once(',').unwrap();
            (x.parse().unwrap(), y.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 65);
    assert_eq!(rows[0], (0.0, 0.0));
    assert_eq!(rows[64].1, 1.0);
    assert!(rows.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 > w[0].1));
}

#[test]
fn mesh_to_file_and_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.obj");
    let o = run(&["mesh", "--n", "4", "--k", "2", "--res", "12", "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["watertight"], true);
    let obj = fs::read_to_string(&path).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count() as u64, v["vertices"].as_u64().unwrap());
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count() as u64, v["triangles"].as_u64().unwrap());

    let o = run(&["mesh", "--n", "3", "--k", "2", "--res", "8"]);
    assert!(stdout(&o).lines().any(|l| l.starts_with("f ")));
}
