//! End-to-end tests of the `fricke` binary.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fricke(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fricke"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = fricke(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

fn write_presentation(name: &str, contents: &str) -> PathBuf {
    let mut path = std::env::temp_dir();
    path.push(format!("fricke-test-{name}-{}.txt", std::process::id()));
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    path
}

#[test]
fn trace_command() {
    assert_eq!(stdout_of(&["trace", "a b a^-1 b^-1"]).trim(), "-x*y*z + x^2 + y^2 + z^2 - 2");
    assert_eq!(stdout_of(&["trace", "1"]).trim(), "2");
    assert_eq!(stdout_of(&["trace", "a b^-1"]).trim(), "x*y - z");
}

#[test]
fn kappa_command() {
    assert_eq!(stdout_of(&["kappa"]).trim(), "-x*y*z + x^2 + y^2 + z^2 - 2");
    assert_eq!(stdout_of(&["kappa", "2", "2", "2"]).trim(), "2");
    assert_eq!(stdout_of(&["kappa", "x", "2", "x"]).trim(), "2");
}

#[test]
fn variety_solve_finds_both_curves() {
    let out = stdout_of(&["variety", "a -> a ; b -> [a,b]", "--solve"]);
    assert!(out.contains("component 1: y=2, z=x"));
    assert!(out.contains("component 2: y=x^2 - 1, z=x^3 - 2*x"));
}

#[test]
fn variety_unsolved_dimensions() {
    let identity = stdout_of(&["variety", "a -> a ; b -> b", "--solve"]);
    assert!(identity.contains("Unsolved: 0 constraints (dimension 3)"));
    let conj = stdout_of(&["variety", "a -> a ; b -> (b a) b (b a)^-1", "--solve"]);
    assert!(conj.contains("E2 = 0"));
    assert!(conj.contains("Unsolved: 1 constraints (dimension 2)"));
}

#[test]
fn variety_check_exit_codes() {
    let ok = fricke(&["variety", "a -> a ; b -> [a,b]", "--check", "y=2; z=x"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = fricke(&["variety", "a -> a ; b -> [a,b]", "--check", "y=2; z=x+1"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn subgroup_commands() {
    assert_eq!(stdout_of(&["subgroup", "rank", "--gens", "a^2 ; a^3"]).trim(), "1");
    assert_eq!(stdout_of(&["subgroup", "contains", "--gens", "a^2 ; b", "a"]).trim(), "false");
    assert_eq!(stdout_of(&["subgroup", "contains", "--gens", "a^2 ; b", "a^2 b"]).trim(), "true");
    assert_eq!(stdout_of(&["subgroup", "express", "--gens", "a^2 ; b", "a^2 b"]).trim(), "g1 g2");
    let fold = stdout_of(&["subgroup", "fold", "--gens", "a b ; b a"]);
    assert!(fold.contains("vertices: 3"));
    assert!(fold.contains("edges: 4"));
    assert!(fold.contains("rank: 2"));
}

#[test]
fn hnn_rewrite_and_word_problem() {
    let one_relator = write_presentation("one-relator", "gens: a t\nrel: t^2 a t^-2 = a^2\n");
    let path = one_relator.to_str().unwrap();
    assert_eq!(
        stdout_of(&["hnn", path, "rewrite"]).trim(),
        "gens: b0 b1; phi: b0 -> b1 ; b1 -> b0^2"
    );
    assert_eq!(stdout_of(&["hnn", path, "normal-form", "t b0 t^-1"]).trim(), "b1");
    assert_eq!(stdout_of(&["hnn", path, "equal", "t^2 b0 t^-2", "b0^2"]).trim(), "true");

    let bs21 = write_presentation("bs21", "gens: a t\nrel: t a t^-1 = a^2\n");
    let bs_path = bs21.to_str().unwrap();
    assert_eq!(stdout_of(&["hnn", bs_path, "equal", "t a t^-1", "a^2"]).trim(), "true");
    assert_eq!(stdout_of(&["hnn", bs_path, "equal", "a t", "t a"]).trim(), "false");

    let doubling = write_presentation(
        "doubling",
        "gens: a b t\nrel: t a t^-1 = a^2\nrel: t b t^-1 = b^2\n",
    );
    assert_eq!(
        stdout_of(&[
            "hnn",
            path,
            "check-hom",
            "--source",
            doubling.to_str().unwrap(),
            "--images",
            "a -> b0 ; b -> b1 ; t -> t^2",
        ])
        .trim(),
        "true"
    );
    for p in [one_relator, bs21, doubling] {
        let _ = std::fs::remove_file(p);
    }
}

#[test]
fn separate_command() {
    let one_relator = write_presentation("separate", "gens: a t\nrel: t^2 a t^-2 = a^2\n");
    let path = one_relator.to_str().unwrap();
    let out = stdout_of(&["separate", path, "a", "--affine", "7"]);
    assert!(out.contains("Affine(7): a=(1,1), t=(3,0)"));
    assert!(out.contains("order: 42"));
    assert_eq!(stdout_of(&["separate", path, "a", "--affine", "2"]).trim(), "none");
    // the identity cannot be separated
    let err = fricke(&["separate", path, "1", "--affine", "7"]);
    assert_eq!(err.status.code(), Some(2));
    let _ = std::fs::remove_file(one_relator);
}

#[test]
fn verify_paper_passes_and_is_deterministic() {
    let first = fricke(&["verify-paper"]);
    assert_eq!(first.status.code(), Some(0));
    let second = fricke(&["verify-paper"]);
    assert_eq!(first.stdout, second.stdout, "reports must be byte-identical");
    let text = String::from_utf8(first.stdout).unwrap();
    assert!(text.contains("overall: PASS (10/10 checks)"));
    for i in 1..=10 {
        assert!(text.contains(&format!("{i:2}. PASS")), "check {i} missing");
    }
}

#[test]
fn json_format() {
    let out = stdout_of(&["--format", "json", "trace", "a b a^-1 b^-1"]);
    let value: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(value["status"], "ok");
    assert_eq!(value["computed"], "-x*y*z + x^2 + y^2 + z^2 - 2");

    let out = stdout_of(&["verify-paper", "--format", "json"]);
    let value: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(value["status"], "pass");
    let checks = value["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 10);
    for check in checks {
        assert_eq!(check["status"], "pass");
        assert!(check["expected"].is_string());
        assert!(check["computed"].is_string());
    }
}

#[test]
fn parse_errors_exit_with_two() {
    let out = fricke(&["trace", "c"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown generator"));
    let out = fricke(&["trace", "a^0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = fricke(&["hnn", "/nonexistent/file.txt", "rewrite"]);
    assert_eq!(out.status.code(), Some(2));
}
