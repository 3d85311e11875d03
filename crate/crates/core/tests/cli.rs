use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_gro-market"));
    c.env_remove("GRO_MARKET_OUT_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    lines
        .map(|l| l.split(',').nth(i).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn zeta_examples() {
    let o = run(&["zeta", "-c", "5", "-r", "1", "-d", "2:1.0"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("zeta = 3.0000000000000000e0"), "{s}");
    assert!(s.contains("lambda = 4.0000000000000002e-1"), "{s}");

    let s = stdout(&run(&["zeta", "-c", "1", "-r", "1", "-d", "0.5:0.5,2:0.5"]));
    let z: f64 = s
        .lines()
        .next()
        .unwrap()
        .trim_start_matches("zeta = ")
        .parse()
        .unwrap();
    assert!((z - 0.151388).abs() < 1e-6);

    let s = stdout(&run(&["zeta", "-c", "1", "-r", "0", "-d", "2:1.0"]));
    assert!(
        s.contains("zeta = 0.0000000000000000e0") && s.contains("lambda = 1.0000000000000000e0")
    );

    let s = stdout(&run(&[
        "zeta",
        "-c",
        "2",
        "-r",
        "1",
        "-d",
        "1/0:0.5,0/1:0.5",
    ]));
    assert_eq!(s.lines().last().unwrap().split(',').count(), 2);

    assert_eq!(
        run(&["zeta", "-c", "0", "-r", "1", "-d", "2:1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["zeta", "-c", "-3", "-r", "1", "-d", "2:1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn malformed_probabilities_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = stdout(&run(&["example", "all-gro", "--print-config"]))
        .replace("\"prob\": 0.5", "\"prob\": 0.45");
    let path = dir.path().join("bad.json");
    std::fs::write(&path, cfg).unwrap();
    let o = run(&["simulate", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("probabilities must sum to 1"));
}

#[test]
fn all_gro_keeps_relative_wealth() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "example",
        "all-gro",
        "--paths",
        "2",
        "--horizon",
        "300",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(dir.path().join("path_0001.csv")).unwrap();
    for m in 1..=3 {
        let r = column(&csv, &format!("r_{m}"));
        assert!(r.iter().all(|x| (x - r[0]).abs() < 1e-9));
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["summary"]["paths"].as_array().unwrap().len(), 2);
}

#[test]
fn decay_example_wealth_falls() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "example",
        "vanishing-wealth",
        "--horizon",
        "500",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let w = column(
        &std::fs::read_to_string(dir.path().join("path_0000.csv")).unwrap(),
        "W",
    );
    assert_eq!(w[0], 2.0);
    assert!(w.windows(2).all(|p| p[1] < p[0]));
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["example", "m3-counterexample"])
        .env("GRO_MARKET_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    let csv = std::fs::read_to_string(dir.path().join("path_0000.csv")).unwrap();
    let y1 = column(&csv, "Y_1")[0];
    assert!((y1 - 11.0 / 12.0).abs() < 1e-15);
    assert_eq!(column(&csv, "Y_3")[0], 1.0);
}

#[test]
fn verify_suites_and_fault_injection() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["verify", "--suite", "growth", "--out-dir", out]);
    assert_eq!(o.status.code(), Some(0));
    assert!(Path::new(out).join("verify_report.json").exists());

    let o = run(&[
        "verify",
        "--suite",
        "drift",
        "--inject-fault",
        "--out-dir",
        out,
    ]);
    assert_eq!(o.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(Path::new(out).join("verify_report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["passed"], false);
    let check = &report["report"]["suites"][0]["checks"][0];
    assert_eq!(check["name"], "drift");
    assert!(check["witness"]["values"]["drift"].as_f64().unwrap() < 0.0);
    assert!(check["witness"]["step"].as_u64().is_some());

    assert_eq!(run(&["verify", "--suite", "zeta"]).status.code(), Some(2));
}

#[test]
fn verify_with_config_audits_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = stdout(&run(&["example", "growth-duel", "--print-config"]));
    let path = dir.path().join("duel.json");
    std::fs::write(&path, cfg).unwrap();
    let o = run(&[
        "verify",
        "--suite",
        "gibbs",
        "--config",
        path.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("config/drift"));
}

#[test]
fn example_list_and_unknown() {
    let s = stdout(&run(&["example"]));
    assert!(s.contains("vanishing-wealth") && s.contains("m3-counterexample"));
    assert_eq!(run(&["example", "nope"]).status.code(), Some(2));
}
