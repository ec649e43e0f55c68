use std::process::{Command, Output};

fn d2dmimo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_d2dmimo")).args(args).output().expect("spawn d2dmimo")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn sweep_mc(threads: &str) -> Vec<u8> {
    let o = Command::new(env!("CARGO_BIN_EXE_d2dmimo"))
        .env("RAYON_NUM_THREADS", threads)
        .args(["sweep", "--mode", "mc", "--seed", "42", "--trials", "3000", "--tc", "4,8", "--lambda-d", "1e-6,1e-5", "-q"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    o.stdout
}

#[test]
fn mc_sweep_identical_across_thread_counts() {
    let one = sweep_mc("1");
    let three = sweep_mc("3");
    assert!(!one.is_empty());
    assert_eq!(one, three);
}

#[test]
fn sweep_csv_header_and_rows() {
    let o = d2dmimo(&["sweep", "--tc", "4:8:2", "--lambda-d", "1e-6:1e-4:3log", "-q"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header.join(","),
        "tc,lambda_d,mode,beta_star_d2d,beta_star_cue,rate_d2d_bps,rate_cue_bps,asr_bps,total_power_w,ee_bits_per_joule,asr_stderr,ee_stderr"
    );
    let recs: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(recs.len(), 9);
    assert_eq!(&recs[0][0], "4");
    assert_eq!(&recs[3][0], "6");
    for r in &recs {
        assert_eq!(&r[2], "analytic");
        let asr: f64 = r[7].parse().unwrap();
        let p: f64 = r[8].parse().unwrap();
        let ee: f64 = r[9].parse().unwrap();
        assert!((ee - asr / p).abs() <= 1e-9 * ee);
    }
}

#[test]
fn sweep_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.json");
    let o = d2dmimo(&["sweep", "--tc", "4", "--lambda-d", "1e-6", "--units", "mbit", "-q", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
    assert_eq!(v["meta"]["units"], "mbit");
    assert!(v["rows"][0]["asr"].as_f64().unwrap() > 1.0);
}

#[test]
fn numerical_failure_exit_codes() {
    let base = ["sweep", "--tc", "4", "--lambda-d", "1e-6", "--inject-analytic-failure", "-q", "--trials", "2000"];
    let o = d2dmimo(&base);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("4,1e-6,analytic,,"));
    let mut args = base.to_vec();
    args.push("--fallback-mc");
    let o = d2dmimo(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains(",mc-fallback,"));
}

#[test]
fn usage_and_config_errors() {
    assert_eq!(d2dmimo(&["sweep", "--bogus"]).status.code(), Some(1));
    assert_eq!(d2dmimo(&["sweep", "--tc", "4:2:1"]).status.code(), Some(1));
    assert_eq!(d2dmimo(&["--units", "furlongs", "power"]).status.code(), Some(1));
    assert_eq!(d2dmimo(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"u_c": 8, "t_c": 4}"#).unwrap();
    let o = d2dmimo(&["--config", bad.to_str().unwrap(), "power"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("u_c ≤ t_c"), "{}", stderr(&o));

    let o = d2dmimo(&["--config", dir.path().join("missing.json").to_str().unwrap(), "power"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn validate_detects_corruption() {
    let ok = d2dmimo(&["validate", "--trials", "20000", "--lambda-d", "0", "--tc", "8", "-q"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(!stdout(&ok).contains(",fail"));
    let bad = d2dmimo(&["validate", "--trials", "20000", "--lambda-d", "0", "--tc", "8", "--inject-analytic-offset", "0.05", "-q"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stdout(&bad).contains(",fail"));
}

#[test]
fn power_breakdown() {
    let o = d2dmimo(&["power", "--lambda-d", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let total = text.lines().find_map(|l| l.strip_prefix("total,")).unwrap();
    assert!((total.parse::<f64>().unwrap() - 49.365).abs() < 0.01);
    let sum: f64 = text
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with("total,"))
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((sum - total.parse::<f64>().unwrap()).abs() < 1e-9);
}

#[test]
fn coverage_curves() {
    let o = d2dmimo(&["coverage", "--mode", "both", "--trials", "5000", "--beta-db", "-5:15:5", "-q"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "user_type,mode,beta_db,beta,coverage,half_width_95");
    assert_eq!(text.lines().count(), 1 + 4 * 5);
    let analytic: Vec<f64> = text
        .lines()
        .filter(|l| l.starts_with("d2d,analytic"))
        .map(|l| l.split(',').nth(4).unwrap().parse().unwrap())
        .collect();
    assert!(analytic.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn rate_diagnostics() {
    let o = d2dmimo(&["rate", "--tc", "8", "--lambda-d", "1e-5", "--units", "mbit"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.lines().next().unwrap().contains("rate_mbps"));
    assert_eq!(text.lines().count(), 3);
}
