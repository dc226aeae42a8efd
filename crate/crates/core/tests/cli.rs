use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ssm_core::ingest::PriceSeries;

fn ssm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .display()
        .to_string()
}

fn write_closes(dir: &Path, name: &str, closes: &[f64]) -> String {
    let path = dir.join(name);
    let s = PriceSeries::from_closes("X", closes).unwrap();
    fs::write(&path, s.to_csv()).unwrap();
    path.display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn out_dir(tmp: &tempfile::TempDir, name: &str) -> PathBuf {
    tmp.path().join(name)
}

#[test]
fn decompose_tone_and_constant() {
    let tmp = tempfile::tempdir().unwrap();
    let tone: Vec<f64> = (0..512)
        .map(|t| 100.0 + (2.0 * PI * t as f64 / 32.0).cos())
        .collect();
    let input = write_closes(tmp.path(), "tone.csv", &tone);
    let out = out_dir(&tmp, "tone");
    let o = ssm(&[
        "decompose",
        "--input",
        &input,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    assert_eq!(stdout(&o).trim(), "imfs=1");
    let csv = fs::read_to_string(out.join("imfs.csv")).unwrap();
    assert!(csv.starts_with("imf1,residual\n"));
    // residual carries only the offset
    for line in csv.lines().skip(1).skip(32).take(448) {
        let r: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((r - 100.0).abs() < 0.05, "{r}");
    }

    let input = write_closes(tmp.path(), "flat.csv", &[5.0; 64]);
    let out = out_dir(&tmp, "flat");
    let o = ssm(&[
        "decompose",
        "--input",
        &input,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(out.join("imfs.csv")).unwrap();
    assert!(csv.starts_with("residual\n"));
}

#[test]
fn usage_and_io_errors_exit_2() {
    let o = ssm(&["decompose", "--input", "/nonexistent/prices.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());
    assert_eq!(ssm(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(ssm(&[]).status.code(), Some(2));
    assert_eq!(
        ssm(&["backtest", "--set", "colour=red"]).status.code(),
        Some(2)
    );
    assert_eq!(ssm(&["--help"]).status.code(), Some(0));
}

#[test]
fn runtime_errors_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.csv");
    fs::write(&bad, "date,close\nx,abc\n").unwrap();
    let o = ssm(&["decompose", "--input", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn hhsa_layers() {
    let tmp = tempfile::tempdir().unwrap();
    let n = 4096;
    let slow = 2.0 * PI * 4.0 / n as f64;
    let mid = 2.0 * PI * 64.0 / n as f64;
    let x: Vec<f64> = (0..n)
        .map(|t| {
            let t = t as f64;
            100.0
                + (1.0 + 0.5 * (mid * t).cos())
                    * (1.0 + 0.3 * (slow * t).cos())
                    * (PI / 2.0 * t).cos()
        })
        .collect();
    let input = write_closes(tmp.path(), "nested.csv", &x);
    let out = out_dir(&tmp, "nested");
    let o = ssm(&[
        "hhsa",
        "--input",
        &input,
        "--out",
        out.to_str().unwrap(),
        "--set",
        "layers=2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    assert!(out.join("am_layer2.csv").exists());
    let summary = fs::read_to_string(out.join("layers.csv")).unwrap();
    let f2: f64 = summary
        .lines()
        .find(|l| l.starts_with("am,2,"))
        .unwrap()
        .rsplit(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((f2 - slow).abs() <= 2.0 * PI / n as f64, "{f2} vs {slow}");

    let tone: Vec<f64> = (0..256)
        .map(|t| 50.0 + (2.0 * PI * t as f64 / 16.0).cos())
        .collect();
    let input = write_closes(tmp.path(), "tone.csv", &tone);
    let out = out_dir(&tmp, "tone");
    let o = ssm(&["hhsa", "--input", &input, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    assert!(stdout(&o).starts_with("am_depth=1 "));

    let o = ssm(&["hhsa", "--input", &input, "--set", "layers=0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ledger_replay() {
    let tmp = tempfile::tempdir().unwrap();
    let out = out_dir(&tmp, "ledger");
    let table = data("set_ledger.csv");
    let o = ssm(&[
        "backtest",
        "--input",
        &table,
        "--out",
        out.to_str().unwrap(),
        "--set",
        "strategy=HHSA_AM2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    assert!(stdout(&o).starts_with("accuracy="));
    let ledger = fs::read_to_string(out.join("ledger.csv")).unwrap();
    let profits: Vec<f64> = ledger
        .lines()
        .skip(1)
        .take(3)
        .map(|l| l.split(',').nth(4).unwrap().parse().unwrap())
        .collect();
    for (got, want) in profits.iter().zip([14.99, 1.25, -5.83]) {
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }
    assert!(out.join("report.json").exists());
    assert!(fs::read_to_string(out.join("report.csv"))
        .unwrap()
        .starts_with("symbol,kernel,days,performance_pct,profit,improved_pct\n"));

    let o = ssm(&[
        "backtest",
        "--input",
        &table,
        "--set",
        "strategy=HHSA_AM2",
        "--set",
        "horizon=1",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn compare_identical_strategies() {
    let tmp = tempfile::tempdir().unwrap();
    let out = out_dir(&tmp, "cmp");
    let o = ssm(&[
        "compare",
        "--input",
        &data("random_walk.csv"),
        "--out",
        out.to_str().unwrap(),
        "--set",
        "strategy=SSM_ANGLE",
        "--set",
        "base_strategy=SSM_ANGLE",
    ]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    assert_eq!(stdout(&o).trim(), "improved=0.00");
    let csv = fs::read_to_string(out.join("compare.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn states_timeline_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = out_dir(&tmp, "st");
    let o = ssm(&[
        "states",
        "--input",
        &data("random_walk.csv"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let states = fs::read_to_string(out.join("states.csv")).unwrap();
    assert!(states.starts_with("t,physiology,hidden,gate_score,emit\n"));
    assert_eq!(states.lines().count(), 601);
    let ichain = fs::read_to_string(out.join("ichain.csv")).unwrap();
    assert!(ichain.starts_with("t,re,im\n"));
}

#[test]
fn dump_config_reparses() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ssm(&[
        "--dump-config",
        "--set",
        "gamma=0.01",
        "--seed",
        "9",
        "--set",
        "strategy=SVM",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let dumped = stdout(&o);
    assert!(dumped.contains("gamma = 0.01\n") && dumped.contains("seed = 9\n"));
    let cfg = tmp.path().join("run.cfg");
    fs::write(&cfg, &dumped).unwrap();
    let again = ssm(&["--dump-config", "--config", cfg.to_str().unwrap()]);
    assert_eq!(stdout(&again), dumped);
}
