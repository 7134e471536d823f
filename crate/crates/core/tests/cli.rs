use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(rel)
}

fn car() -> String {
    data("mini/cars/car_01.ppm").display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entroseed"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn help_lists_every_subcommand() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for sub in ["seed", "cluster", "elbow", "bench", "entropy"] {
        assert!(text.contains(sub), "missing {sub} in\n{text}");
    }
    // repeated invocations print identical help
    assert_eq!(stdout(&run(&["--help"])), text);
}

#[test]
fn subcommand_help_documents_flags() {
    let text = stdout(&run(&["cluster", "--help"]));
    for flag in [
        "--image",
        "--measure",
        "--alpha",
        "--beta",
        "--k",
        "--th",
        "--strict",
        "--grayscale",
        "--rng-seed",
        "--max-iter",
        "--tol",
        "--empty-cluster",
        "--labels-out",
        "--format",
        "--out",
    ] {
        assert!(text.contains(flag), "missing {flag}");
    }
    assert!(stdout(&run(&["bench", "--help"])).contains("--elbow-out"));
}

#[test]
fn version_flag() {
    let o = run(&["--version"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["seed"]).status.code(), Some(2));
    assert_eq!(
        run(&["seed", "--image", &car(), "--nope"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["seed", "--image", &car(), "--measure", "renyi"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["seed", "--image", &car(), "--k", "-1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["elbow", "--image", &car(), "--k-min", "5", "--k-max", "2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn parameter_violation_exits_one_with_constraint() {
    let o = run(&[
        "cluster",
        "--image",
        &car(),
        "--measure",
        "kapur",
        "--alpha",
        "1",
        "--beta",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("α ≠ 1"), "{}", stderr(&o));

    let o = run(&[
        "seed",
        "--image",
        &car(),
        "--measure",
        "taneja",
        "--alpha",
        "1",
        "--beta",
        "3.141592653589793",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("β ≠ kπ"), "{}", stderr(&o));
}

#[test]
fn strict_exhaustion_exits_one() {
    let o = run(&[
        "seed",
        "--image",
        &car(),
        "--k",
        "3",
        "--th",
        "400",
        "--strict",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("exhausted"), "{}", stderr(&o));
}

#[test]
fn unreadable_input_exits_three() {
    assert_eq!(
        run(&["seed", "--image", "/no/such/image.png"])
            .status
            .code(),
        Some(3)
    );
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.png");
    std::fs::write(&bad, b"\x89PNG\r\n\x1a\ntruncated").unwrap();
    let o = run(&["cluster", "--image", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn seed_json_output() {
    let o = run(&[
        "seed",
        "--image",
        &car(),
        "--k",
        "3",
        "--measure",
        "taneja",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["k"], 3);
    assert_eq!(v["method"], "Taneja(2,1)");
    assert_eq!(v["centroids"].as_array().unwrap().len(), 3);
    assert!(v["init_time_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn random_seeding_is_reproducible() {
    let args = [
        "seed",
        "--image",
        &car(),
        "--k",
        "4",
        "--measure",
        "random",
        "--rng-seed",
        "9",
        "--format",
        "json",
    ];
    let a: serde_json::Value = serde_json::from_slice(&run(&args).stdout).unwrap();
    let b: serde_json::Value = serde_json::from_slice(&run(&args).stdout).unwrap();
    assert_eq!(a["centroids"], b["centroids"]);
    assert_eq!(a["effective_th"], serde_json::Value::Null);
}

#[test]
fn cluster_writes_labels_and_output_files() {
    let dir = TempDir::new().unwrap();
    let labels = dir.path().join("labels.txt");
    let out = dir.path().join("result.txt");
    let o = run(&[
        "cluster",
        "--image",
        &car(),
        "--k",
        "3",
        "--grayscale",
        "--labels-out",
        labels.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("nik: ") && text.contains("sse: ") && text.contains("total_time_s: "));
    let labels = std::fs::read_to_string(&labels).unwrap();
    assert_eq!(labels.lines().count(), 64 * 48);
    assert!(labels.lines().all(|l| matches!(l, "0" | "1" | "2")));
}

#[test]
fn elbow_prints_curve_and_suggestion() {
    let o = run(&["elbow", "--image", &car(), "--k-max", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].starts_with("1 "));
    assert!(text.contains("# suggested k: "));
}

#[test]
fn bench_writes_report_and_elbow_files() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("report.csv");
    let elbow = dir.path().join("elbow.txt");
    let manifest = data("mini/cars.manifest");
    let o = Command::new(env!("CARGO_BIN_EXE_entroseed"))
        .env("ENTROSEED_THREADS", "2")
        .args([
            "bench",
            "--manifest",
            manifest.to_str().unwrap(),
            "--format",
            "csv",
        ])
        .args([
            "--out",
            report.to_str().unwrap(),
            "--elbow-out",
            elbow.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&report).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "dataset,initialization,avg_nik,init_time_s,compute_time_s,total_time_s,avg_sse"
    );
    assert_eq!(lines.len(), 5);
    assert!(std::fs::read_to_string(&elbow)
        .unwrap()
        .contains("# suggested k:"));
}

#[test]
fn bench_with_bad_manifest_exits_one() {
    let dir = TempDir::new().unwrap();
    let m = dir.path().join("bad.manifest");
    std::fs::write(
        &m,
        "name = X\nchannels = 3\nk = 1\nmethod = shannon\n[images]\na.png\n",
    )
    .unwrap();
    assert_eq!(
        run(&["bench", "--manifest", m.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["bench", "--manifest", "/no/such.manifest"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn entropy_calculator() {
    let o = run(&["entropy", "--probs", "0.25,0.25,0.25,0.25"]);
    assert_eq!(stdout(&o).trim(), "2.0");
    let o = run(&[
        "entropy",
        "--probs",
        "0.5,0.5",
        "--measure",
        "Havrda-Charvat",
    ]);
    assert_eq!(stdout(&o).trim(), "1.0");
    let o = run(&["entropy", "--probs", "0.7,0.7"]);
    assert_eq!(o.status.code(), Some(1));
}
