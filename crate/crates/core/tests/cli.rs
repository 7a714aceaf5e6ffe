use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_borel-stein"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(!text.contains('\r'));
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn pmf_table() {
    let out = run(&["pmf", "--lambda", "0.5", "--eps", "1e-10"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(text.starts_with("j,pmf,cdf\n"));
    let rows = csv_rows(&out);
    let first: f64 = rows[0][1].parse().unwrap();
    assert!((first - (-0.5f64).exp()).abs() < 1e-16);
    let cdf: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(cdf.windows(2).all(|w| w[1] >= w[0]));
    assert!(*cdf.last().unwrap() >= 1.0 - 1e-10);
    assert!(String::from_utf8_lossy(&out.stderr).contains("window 1..="));
}

#[test]
fn bad_lambda_is_a_usage_error() {
    for args in [
        &["pmf", "--lambda", "1.5"][..],
        &["stein-check", "--lambda", "1.5"],
        &["queue-bounds", "--lambda", "0"],
        &["pmf", "--lambda", "0.5", "--eps", "2"],
        &["report", "--seed", "-1"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn stein_check_passes() {
    for l in ["0.3", "0.9"] {
        let out = run(&["stein-check", "--lambda", l, "--table-size", "60"]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let rows = csv_rows(&out);
        assert_eq!(rows.len(), 59 * 60 / 2);
        for r in rows {
            let a: f64 = r[2].parse().unwrap();
            let b: f64 = r[3].parse().unwrap();
            assert!(a.abs() <= b + 1e-12);
        }
    }
}

#[test]
fn qbd2_is_not_available_at_one_half() {
    let out = run(&[
        "queue-bounds",
        "--lambda",
        "0.5",
        "--n",
        "20000",
        "--service",
        "exponential",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "qbd2_or_NA").unwrap();
    assert_eq!(csv_rows(&out)[0][col], "NA");
    assert!(String::from_utf8_lossy(&out.stderr).contains("NA"));

    let out = run(&[
        "queue-bounds",
        "--lambda",
        "0.25",
        "--n",
        "20000",
        "--service",
        "exponential",
    ]);
    let qbd2: f64 = csv_rows(&out)[0][col].parse().unwrap();
    assert!((qbd2 - 0.15091).abs() < 1e-5);
}

#[test]
fn same_seed_same_bytes() {
    let args = [
        "queue-sim",
        "--lambda",
        "0.4",
        "--service",
        "gamma:4",
        "--n",
        "150000",
        "--seed",
        "9",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let single = bin()
        .args(args)
        .env("BOREL_STEIN_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, single.stdout);
    let other = run(&[
        "queue-sim",
        "--lambda",
        "0.4",
        "--service",
        "gamma:4",
        "--n",
        "150000",
        "--seed",
        "10",
    ]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn tails_json_and_file_output() {
    let dir = std::env::temp_dir().join(format!("borel-stein-cli-{}", std::process::id()));
    let path = dir.join("tails.json");
    let out = run(&[
        "tails",
        "--lambda-grid",
        "0.3,0.7",
        "--t",
        "0.5,2",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2 * 2 * 2);
    for r in rows {
        let exact = r["exact"].as_f64().unwrap();
        let bound = r["bound"].as_f64().unwrap();
        assert!(exact <= bound + r["exact_err"].as_f64().unwrap());
        assert_eq!(r["K"].is_null(), r["side"] == "lower");
    }
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn sb_check_reports_both_identities() {
    let out = run(&["sb-check", "--lambda", "0.6"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 1);
    let upper: f64 = rows[0][2].parse().unwrap();
    assert!(upper <= 1e-8);
}
