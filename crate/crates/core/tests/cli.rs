//! End-to-end runs of the `saddlenode` binary.

use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_saddlenode"))
        .args(args)
        .env_remove("SADDLENODE_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn signal_eval_matches_the_hat_formula() {
    let out = run(&[
        "signal",
        "eval",
        "--preset",
        "fig1",
        "--k",
        "3",
        "--window=-4:4",
        "--stride",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let table = rows(&stdout(&out));
    assert_eq!(table[0], ["t", "value"]);
    assert_eq!(table.len(), 18);
    for row in &table[1..] {
        let t: f64 = row[0].parse().unwrap();
        let v: f64 = row[1].parse().unwrap();
        let k = 3.0;
        let expected = f64::max(
            -1.0,
            f64::max(
                f64::min(1.0, 1.0 - k / 2.0 - t),
                f64::min(1.0, 1.0 - k / 2.0 + t),
            ),
        );
        assert!((v - expected).abs() < 1e-12, "t = {t}: {v} vs {expected}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["solve", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(
        run(&["bifurcate", "--preset", "fig1", "--model", "circuit"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["solve", "--model", "quadratic-demo", "--tol=-1"])
            .status
            .code(),
        Some(2)
    );
    let same_side = run(&[
        "bifurcate",
        "--model",
        "quadratic-demo",
        "--lambda",
        "0.5:0.7",
    ]);
    assert_eq!(same_side.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&same_side.stderr).contains("numerical failure"));
}

#[test]
fn runs_are_deterministic() {
    let args = ["bifurcate", "--model", "cubic-demo", "--tol", "1e-4"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let table = rows(&stdout(&a));
    assert_eq!(
        table[0],
        [
            "k",
            "lambda_minus",
            "lambda_plus",
            "bracket_width",
            "status"
        ]
    );
    let plus: f64 = table[1][2].parse().unwrap();
    assert!((plus - 2.0 / (3.0 * 3f64.sqrt())).abs() < 2e-4);
}

#[test]
fn json_report_replays_as_config() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let first = run(&[
        "bifurcate",
        "--model",
        "quadratic-demo",
        "--lambda=-1:1",
        "--tol",
        "1e-5",
        "--out",
        out_dir,
    ]);
    assert_eq!(first.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("bifurcate.csv")).unwrap();
    let json = dir.path().join("bifurcate.json");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["command"], "bifurcate");
    assert_eq!(report["config"]["tol"], 1e-5);

    let replay = run(&["bifurcate", "--config", json.to_str().unwrap()]);
    assert_eq!(replay.status.code(), Some(0));
    assert_eq!(stdout(&replay), csv);
}

#[test]
fn toml_config_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    fs::write(
        &path,
        "model = \"quadratic-demo\"\nlambda = [-1.0, 1.0]\ntol = 1e-2\n",
    )
    .unwrap();
    let out = run(&[
        "bifurcate",
        "--config",
        path.to_str().unwrap(),
        "--tol",
        "1e-4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let table = rows(&stdout(&out));
    let width: f64 = table[1][2].parse().unwrap();
    // The tolerance bounds the half-width of the final bracket.
    assert!(
        width <= 2e-4,
        "flag should override the file tolerance, width {width}"
    );

    fs::write(&path, "model = \"quadratic-demo\"\nlamda = 0.5\n").unwrap();
    assert_eq!(
        run(&["bifurcate", "--config", path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn solve_reports_blowup() {
    let out = run(&[
        "solve",
        "--model",
        "quadratic-demo",
        "--lambda=-1",
        "--x0",
        "0",
        "--window",
        "0:3",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let text = report["result"].to_string();
    assert!(
        text.contains("1.5707"),
        "escape time near pi/2 expected in {text}"
    );
}

#[test]
fn curve_rows_follow_the_grid() {
    let out = run(&[
        "curve",
        "--preset",
        "fig1",
        "--k",
        "4:8:4",
        "--tol",
        "1e-3",
        "--cross-checks",
        "0",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let table = rows(&stdout(&out));
    assert_eq!(table[0], ["k", "lambda_tilde", "bracket_width", "status"]);
    let ks: Vec<&str> = table[1..].iter().map(|r| r[0].as_str()).collect();
    assert_eq!(ks, ["4", "8"]);
    let l4: f64 = table[1][1].parse().unwrap();
    let l8: f64 = table[2][1].parse().unwrap();
    assert!(l8 < l4);
}

#[test]
fn svg_output_for_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "classify",
        "--preset",
        "sec42",
        "--lambda",
        "0.2",
        "--stride",
        "5",
        "--format",
        "svg",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert!(names.iter().any(|n| n.ends_with(".json")), "{names:?}");
    assert!(names.iter().any(|n| n.ends_with(".csv")), "{names:?}");
    let svg = fs::read_to_string(dir.path().join("classify.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
}
