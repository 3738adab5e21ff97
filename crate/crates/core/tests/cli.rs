use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;
use vertalign::io::load_report;
use vertalign::solver::Status;

fn vertalign(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vertalign"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn gen(dir: &Path, extra: &[&str]) {
    let d = dir.to_str().unwrap();
    let mut args = vec!["gen", "--out", d];
    args.extend_from_slice(extra);
    let out = vertalign(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

fn input_args(dir: &Path) -> Vec<String> {
    let p = |f: &str| dir.join(f).to_str().unwrap().to_string();
    vec![
        "--network".into(),
        p("network.toml"),
        "--sections".into(),
        p("sections.csv"),
        "--profile".into(),
        p("profile.csv"),
    ]
}

fn run(sub: &str, dir: &Path, extra: &[&str]) -> Output {
    let mut args: Vec<String> = vec![sub.into()];
    args.extend(input_args(dir));
    args.extend(extra.iter().map(|s| s.to_string()));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    vertalign(&refs)
}

#[test]
fn flat_network_costs_nothing() {
    let tmp = TempDir::new().unwrap();
    gen(tmp.path(), &["--roads", "3", "--intersections", "2"]);
    for model in ["uva", "cuva"] {
        let out_dir = tmp.path().join(model);
        let out = run(
            "solve",
            tmp.path(),
            &["--model", model, "--out", out_dir.to_str().unwrap()],
        );
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let report = load_report(out_dir.join("report.json")).unwrap();
        assert_eq!(report.status, Status::Optimal);
        assert_eq!(report.objective, Some(0.0));
        assert!(report.roads.iter().flat_map(|r| &r.offsets).all(|&u| u == 0.0));
        for f in ["manifest.json", "report.txt", "solution.json"] {
            assert!(out_dir.join(f).exists(), "{f}");
        }
    }
}

#[test]
fn usage_errors_exit_one() {
    let out = vertalign(&["solve", "--no-such-flag"]);
    assert_eq!(code(&out), 1);
    assert!(!out.stderr.is_empty());
    assert_eq!(code(&vertalign(&[])), 1);
    let out = vertalign(&["fit", "--network", "/nonexistent/net.toml", "--sections", "/nonexistent/s.csv"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn help_exits_zero() {
    let out = vertalign(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("solve"));
}

#[test]
fn steep_ground_is_infeasible() {
    let tmp = TempDir::new().unwrap();
    gen(tmp.path(), &["--terrain", "steep", "--offset-bound", "0.5"]);
    let out_dir = tmp.path().join("out");
    let out = run("solve", tmp.path(), &["--model", "uva", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stdout));
    let report = load_report(out_dir.join("report.json")).unwrap();
    assert_eq!(report.status, Status::Infeasible);
}

#[test]
fn tiny_time_limit_exits_three() {
    let tmp = TempDir::new().unwrap();
    gen(
        tmp.path(),
        &["--roads", "12", "--intersections", "5", "--materials", "2", "--terrain", "sinusoidal"],
    );
    let out_dir = tmp.path().join("out");
    let out = run(
        "solve",
        tmp.path(),
        &["--model", "cuva", "--time-limit", "1e-9", "--out", out_dir.to_str().unwrap()],
    );
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn validate_accepts_its_own_solution() {
    let tmp = TempDir::new().unwrap();
    gen(tmp.path(), &["--roads", "2", "--intersections", "1", "--terrain", "sinusoidal"]);
    let out_dir = tmp.path().join("out");
    let out = run("solve", tmp.path(), &["--model", "uva", "--slabs", "4", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let solution = out_dir.join("solution.json");
    let out = run(
        "validate",
        tmp.path(),
        &["--model", "uva", "--slabs", "4", "--solution", solution.to_str().unwrap()],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    // the solution belongs to the other model
    let out = run("validate", tmp.path(), &["--model", "cuva", "--solution", solution.to_str().unwrap()]);
    assert_ne!(code(&out), 0);
}

#[test]
fn compare_writes_speedup_column() {
    let tmp = TempDir::new().unwrap();
    gen(tmp.path(), &["--roads", "3", "--intersections", "2", "--terrain", "sinusoidal"]);
    let out_dir = tmp.path().join("cmp");
    let out = run(
        "compare",
        tmp.path(),
        &["--models", "uva,cuva,angle", "--runs", "2", "--slabs", "4", "--out", out_dir.to_str().unwrap()],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("comparison.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let speedup = header.iter().position(|&h| h == "Speedup").unwrap();
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][speedup], "1.0000");
    assert!(rows.iter().all(|r| r[speedup].parse::<f64>().unwrap() > 0.0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), csv);
}

#[test]
fn export_fit_and_build_write_their_files() {
    let tmp = TempDir::new().unwrap();
    gen(tmp.path(), &["--terrain", "sinusoidal"]);
    let dir = tmp.path().join("art");
    let d = dir.to_str().unwrap();
    for model in ["uva", "cuva"] {
        let out = run("export", tmp.path(), &["--model", model, "--out", d]);
        assert_eq!(code(&out), 0);
        let mps = std::fs::read_to_string(dir.join(format!("{model}.mps"))).unwrap();
        assert!(mps.starts_with("NAME") || mps.contains("\nNAME"));
        assert!(mps.trim_end().ends_with("ENDATA"));
    }
    let out = run("fit", tmp.path(), &["--out", d]);
    assert_eq!(code(&out), 0);
    assert!(dir.join("fits.json").exists());
    assert!(!out.stdout.is_empty());
    let out = run("build", tmp.path(), &["--model", "uva", "--out", d]);
    assert_eq!(code(&out), 0);
    assert!(dir.join("instance.json").exists());
}
