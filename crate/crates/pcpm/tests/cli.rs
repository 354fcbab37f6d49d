mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn pcpm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcpm"))
        .args(args)
        .env("PCPM_WORKERS", "2")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
}

fn toy_file(dir: &Path) -> String {
    let p = dir.join("toy.txt");
    fs::write(&p, common::TOY_EDGE_LIST).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn run_reports_png_size_and_matches_pull() {
    let dir = tempfile::tempdir().unwrap();
    let toy = toy_file(dir.path());
    let o = pcpm(&[
        "run",
        &toy,
        "--engine",
        "pcpm",
        "--q",
        "2",
        "--repeats",
        "1",
        "--value-width",
        "8",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(field(&text, "e_prime"), "7");
    let r: f64 = field(&text, "r").parse().unwrap();
    assert_eq!(r, 9.0 / 7.0);
    let pull = stdout(&pcpm(&[
        "run",
        &toy,
        "--engine",
        "pdpr",
        "--repeats",
        "1",
        "--value-width",
        "8",
    ]));
    let a: f64 = field(&text, "checksum").parse().unwrap();
    let b: f64 = field(&pull, "checksum").parse().unwrap();
    assert!((a - b).abs() < 1e-6);
}

#[test]
fn run_writes_traffic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let toy = toy_file(dir.path());
    let out = dir.path().join("run.csv");
    let o = pcpm(&[
        "run",
        &toy,
        "--q",
        "2",
        "--iters",
        "1",
        "--repeats",
        "2",
        "--count-traffic",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, pcpm::report::RUN_HEADER);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    let scatter = rows.iter().find(|r| &r[1] == "scatter").unwrap();
    // 7 updates of 4 bytes in one iteration
    assert_eq!(&scatter[4], "28");
    assert_eq!(&scatter[6], "7");
    let gather = rows.iter().find(|r| &r[1] == "gather").unwrap();
    assert_eq!(&gather[7], "9");
}

#[test]
fn convert_then_run_equals_text_run() {
    let dir = tempfile::tempdir().unwrap();
    let toy = toy_file(dir.path());
    let bin = dir.path().join("toy.pcsr");
    assert!(pcpm(&["convert", &toy, bin.to_str().unwrap()]).status.success());
    let a = stdout(&pcpm(&["run", &toy, "--q", "2", "--repeats", "1"]));
    let b = stdout(&pcpm(&["run", bin.to_str().unwrap(), "--q", "2", "--repeats", "1"]));
    assert_eq!(field(&a, "checksum"), field(&b, "checksum"));
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.pcsr");
    let b = dir.path().join("b.pcsr");
    for p in [&a, &b] {
        let o = pcpm(&[
            "generate",
            "--scale",
            "8",
            "--edge-factor",
            "4",
            "--seed",
            "3",
            p.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn sweep_csv_ratio_grows_with_width() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.pcsr");
    assert!(pcpm(&["generate", "--scale", "10", "--seed", "5", g.to_str().unwrap()])
        .status
        .success());
    let o = pcpm(&[
        "sweep",
        g.to_str().unwrap(),
        "--q",
        "8,16,32,64,128",
        "--engine",
        "pcpm",
        "--iters",
        "2",
        "--repeats",
        "1",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        pcpm::report::SWEEP_HEADER
    );
    let rows: Vec<(f64, f64)> = rdr
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[3].parse().unwrap(), r[4].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 5);
    for w in rows.windows(2) {
        assert!(w[1].0 >= w[0].0, "r fell: {rows:?}");
        assert!(w[1].1 <= w[0].1, "bytes rose: {rows:?}");
    }
}

#[test]
fn model_defaults_and_zero_graph() {
    let o = pcpm(&["model"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("metric,engine,r,value\n"));
    assert!(text.contains("breakeven_cmr,bvgas,1,0.1875\n"));
    assert!(text.contains("random_accesses,pcpm,1,262144\n"));

    let o = pcpm(&["model", "--n", "0", "--m", "0", "--r-sweep", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    for r in rdr.records() {
        let r = r.unwrap();
        if &r[0] != "breakeven_cmr" {
            assert_eq!(r[3].parse::<f64>().unwrap(), 0.0, "{r:?}");
        }
    }
}

#[test]
fn validate_passes_and_catches_fault() {
    let dir = tempfile::tempdir().unwrap();
    let toy = toy_file(dir.path());
    let o = pcpm(&["validate", &toy, "--q", "2"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
    let o = pcpm(&["validate", &toy, "--q", "2", "--inject-png-fault"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL png"));
}

#[test]
fn validate_rmat_scale_12() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.pcsr");
    assert!(pcpm(&["generate", "--scale", "12", g.to_str().unwrap()])
        .status
        .success());
    let o = pcpm(&["validate", g.to_str().unwrap(), "--q", "256"]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn failures_exit_non_zero() {
    let dir = tempfile::tempdir().unwrap();
    let toy = toy_file(dir.path());
    for args in [
        vec!["run", "/nonexistent/g.txt"],
        vec!["run", toy.as_str(), "--engine", "nope"],
        vec!["run", toy.as_str(), "--q", "0"],
        vec!["run", toy.as_str(), "--damping", "1.5"],
        vec!["run", toy.as_str(), "--value-width", "2"],
        vec!["model", "--r", "0.5"],
    ] {
        let o = pcpm(&args);
        assert!(!o.status.success(), "{args:?} succeeded");
        assert!(!o.stderr.is_empty());
    }
}
