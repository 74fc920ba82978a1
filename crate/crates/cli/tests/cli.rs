//! End-to-end checks of the binary: output lines, exit codes, file formats.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sgon"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

const C6: &str = "mgf 6\ne 0 1\ne 1 2\ne 2 3\ne 3 4\ne 4 5\ne 5 0\n";
const K4: &str = "mgf 4\ne 0 1\ne 0 2\ne 0 3\ne 1 2\ne 1 3\ne 2 3\n";
const B4: &str = "mgf 2\ne 0 1\ne 0 1\ne 0 1\ne 0 1\n";
const TREE: &str = "mgf 4\ne 0 1\ne 1 2\ne 1 3\n";

#[test]
fn compute_prints_the_value() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "c6.mgf", C6);
    let out = run(&["compute", path_str(&g)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "sgon = 2\n");
}

#[test]
fn decide_uses_exit_codes_for_the_answer() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "k4.mgf", K4);
    let out = run(&["compute", path_str(&g), "--decide", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "no\n");
    let out = run(&["compute", path_str(&g), "--decide", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "yes\n");
}

#[test]
fn certificate_round_trips_through_verify() {
    let dir = TempDir::new().unwrap();
    for (name, text, expected) in [
        ("c6.mgf", C6, "sgon = 2\n"),
        ("tree.mgf", TREE, "sgon = 1\n"),
        ("k4.mgf", K4, "sgon = 3\n"),
    ] {
        let g = write(dir.path(), name, text);
        let cert = dir.path().join(format!("{name}.cert"));
        let out = run(&["compute", path_str(&g), "--certificate", path_str(&cert)]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(stdout(&out), expected);
        let out = run(&["verify", path_str(&g), path_str(&cert)]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", stdout(&out));
        assert!(stdout(&out).starts_with("valid degree="), "{name}: {}", stdout(&out));
    }
}

#[test]
fn verify_rejections_use_exit_code_one() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "c6.mgf", C6);
    let cert = dir.path().join("c6.cert");
    run(&["compute", path_str(&g), "--certificate", path_str(&cert)]);

    // Zero out one index.
    let text = std::fs::read_to_string(&cert).unwrap();
    let tampered = text.replacen("he 0 1 1 0 1", "he 0 1 0 0 1", 1);
    assert_ne!(text, tampered);
    let bad = write(dir.path(), "bad.cert", &tampered);
    let out = run(&["verify", path_str(&g), path_str(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "invalid: index must be ≥ 1\n");

    // Same certificate against an unrelated graph.
    let other = write(dir.path(), "b4.mgf", B4);
    let out = run(&["verify", path_str(&other), path_str(&cert)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "invalid: refinement does not restore base graph\n");
}

#[test]
fn bounds_line_format() {
    let dir = TempDir::new().unwrap();
    for (name, text, expected) in [
        ("b4.mgf", B4, "lower=2 upper=3\n"),
        ("tree.mgf", TREE, "lower=1 upper=1\n"),
        ("k4.mgf", K4, "lower=2 upper=3\n"),
    ] {
        let g = write(dir.path(), name, text);
        let out = run(&["bounds", path_str(&g)]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(stdout(&out), expected, "{name}");
    }
}

#[test]
fn malformed_input_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "bad.mgf", "mgf 2\ne 0 3\n");
    let out = run(&["compute", path_str(&g)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("vertex id 3 out of range"));

    let g = write(dir.path(), "disconnected.mgf", "mgf 2\n");
    let out = run(&["compute", path_str(&g)]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["verify", path_str(&g)]);
    assert_eq!(out.status.code(), Some(2), "missing argument is a usage error");

    let missing = dir.path().join("nope.mgf");
    let out = run(&["bounds", path_str(&missing)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reduce3dm_emits_gadget_files() {
    let dir = TempDir::new().unwrap();
    let inst = write(dir.path(), "yes.3dm", "3dm 2\ns 0 0 0\ns 0 0 1\ns 1 1 0\ns 1 1 1\n");
    let prefix = dir.path().join("gadget");
    let out = run(&["reduce3dm", path_str(&inst), prefix.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    let mgf = std::fs::read_to_string(dir.path().join("gadget.mgf")).unwrap();
    assert!(mgf.starts_with("mgf 16\n"));
    let tf = std::fs::read_to_string(dir.path().join("gadget.tf")).unwrap();
    assert!(tf.starts_with("tree 7\n"));
    assert!(tf.contains("target 6\n"));

    // The fixed-map decision runs off the emitted files.
    let gadget_mgf = dir.path().join("gadget.mgf");
    let gadget_tf = dir.path().join("gadget.tf");
    let out = run(&[
        "compute",
        path_str(&gadget_mgf),
        "--fixed-tf",
        path_str(&gadget_tf),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("yes\nbest = 6\n"));

    // A duplicate triple is rejected at parse time.
    let dup = write(dir.path(), "dup.3dm", "3dm 2\ns 0 0 0\ns 0 0 0\n");
    let out = run(&["reduce3dm", path_str(&dup), prefix.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fixed_tf_no_instance_exits_one() {
    let dir = TempDir::new().unwrap();
    let inst = write(dir.path(), "no.3dm", "3dm 2\ns 0 0 0\ns 0 1 1\ns 1 0 1\ns 1 1 0\n");
    let prefix = dir.path().join("g");
    run(&["reduce3dm", path_str(&inst), prefix.to_str().unwrap()]);
    let mgf = dir.path().join("g.mgf");
    let tf = dir.path().join("g.tf");
    let out = run(&["compute", path_str(&mgf), "--fixed-tf", path_str(&tf)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("no\n"));
}

#[test]
fn enumerate_stats_lines() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "tri.mgf", "mgf 3\ne 0 1\ne 1 2\ne 2 0\n");
    let out = run(&["enumerate-stats", path_str(&g)]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[..3],
        ["k=1 trees=1 partitions=1", "k=2 trees=1 partitions=3", "k=3 trees=3 partitions=1"]
    );
    assert!(lines[3].starts_with("total=7 bound="));
}
