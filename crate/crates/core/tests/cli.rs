use std::fs;
use std::path::Path;
use std::process::Command;

use tempfile::TempDir;

const K4: &str = "p 4 6\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n";

fn run(dir: &Path, args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_roommates"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn workspace(files: &[(&str, &str)]) -> TempDir {
    let dir = TempDir::new().unwrap();
    for (name, text) in files {
        fs::write(dir.path().join(name), text).unwrap();
    }
    dir
}

#[test]
fn exact_egal_on_triangle_is_unsolvable() {
    let dir = workspace(&[("triangle.sri", "sri 3\n1: 2 3\n2: 3 1\n3: 1 2\n")]);
    let (code, out, _) = run(dir.path(), &["egal", "triangle.sri", "--mode", "exact"]);
    assert_eq!(code, 2);
    assert_eq!(out, "verdict: unsolvable\n");
}

#[test]
fn tied_triangle_has_a_stable_matching() {
    let dir = workspace(&[("tied_triangle.srti", "srti 3\n1: (2 3)\n2: 3 1\n3: 1 2\n")]);
    let (code, out, _) = run(
        dir.path(),
        &["minbp", "tied_triangle.srti", "--mode", "auto"],
    );
    assert_eq!(code, 0);
    assert_eq!(out, "bp=0\n1 3\n");
}

#[test]
fn solve_and_egal_on_four_cycle() {
    let dir = workspace(&[("c4.sri", "sri 4\n1: 2 4\n2: 3 1\n3: 4 2\n4: 1 3\n")]);
    let (code, out, _) = run(dir.path(), &["egal", "c4.sri", "--mode", "exact"]);
    assert_eq!(code, 0);
    assert!(out.ends_with("cost=6\n"), "{out}");
    let (code, out, _) = run(dir.path(), &["enumerate", "c4.sri"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("count=2\n"));
    let (code, out, _) = run(dir.path(), &["--json", "solve", "c4.sri"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "stable");
}

#[test]
fn approx_reports_guarantee_and_ratio() {
    let dir = workspace(&[("c4.sri", "sri 4\n1: 2 4\n2: 3 1\n3: 4 2\n4: 1 3\n")]);
    let (code, out, _) = run(
        dir.path(),
        &["egal", "c4.sri", "--mode", "approx", "--d", "3", "--oracle"],
    );
    assert_eq!(code, 0);
    assert!(out.contains("guarantee=9/7"), "{out}");
    assert!(out.contains("ratio=1"), "{out}");
}

#[test]
fn gen_vc_and_verify_round_trip() {
    let dir = workspace(&[("k4.g", K4)]);
    let (code, out, _) = run(dir.path(), &["gen", "vc", "--graph", "k4.g", "--k", "3"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().any(|l| l == "K'=121"), "{out}");
    assert!(out.starts_with("agents=72\n"));
    for f in ["k4.sri", "k4.labels", "k4.bundle"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }

    let (code, witness, _) = run(dir.path(), &["egal", "k4.sri", "--mode", "exact"]);
    assert_eq!(code, 0);
    fs::write(dir.path().join("w.txt"), &witness).unwrap();
    let (code, out, _) = run(
        dir.path(),
        &["verify", "reduction", "k4.bundle", "--witness", "w.txt"],
    );
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("cost=121 K'=121 within_target=true"), "{out}");

    fs::write(dir.path().join("bad.txt"), "1 2\n").unwrap();
    let (code, out, _) = run(
        dir.path(),
        &["verify", "reduction", "k4.bundle", "--witness", "bad.txt"],
    );
    assert_eq!(code, 2, "{out}");
    assert!(out.starts_with("verdict: rejected"));
}

#[test]
fn gen_sat_and_verify_round_trip() {
    let cnf = "p cnf 3 4\n1 2 3 0\n1 2 3 0\n-1 -2 -3 0\n-1 -2 -3 0\n";
    let dir = workspace(&[("f.cnf", cnf)]);
    let (code, out, _) = run(dir.path(), &["gen", "sat", "--cnf", "f.cnf"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("agents=92\n"));
    let (code, witness, _) = run(dir.path(), &["solvable", "f.srti"]);
    assert_eq!(code, 0);
    fs::write(dir.path().join("w.txt"), &witness).unwrap();
    let (code, out, _) = run(
        dir.path(),
        &["verify", "reduction", "f.bundle", "--witness", "w.txt"],
    );
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("bp=0"), "{out}");

    let (code, out, _) = run(
        dir.path(),
        &[
            "gen", "sat", "--cnf", "f.cnf", "--copies", "2", "--out", "amp",
        ],
    );
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("agents=187\n"));
}

#[test]
fn strict_mode_rejects_occurrence_excess() {
    let dir = workspace(&[("f.cnf", "p cnf 3 3\n1 2 3 0\n1 2 -3 0\n1 -2 3 0\n")]);
    let (code, _, err) = run(dir.path(), &["gen", "sat", "--cnf", "f.cnf"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error:"), "{err}");
}

#[test]
fn size_guard_and_force() {
    let (_, inst, _) = run(
        Path::new("."),
        &["random", "--n", "14", "--d", "3", "--seed", "2"],
    );
    let dir = workspace(&[("big.sri", &inst)]);
    let (code, _, err) = run(dir.path(), &["minbp", "big.sri", "--mode", "brute"]);
    assert_eq!(code, 1, "{err}");
    let (code, out, _) = run(
        dir.path(),
        &["minbp", "big.sri", "--mode", "brute", "--force"],
    );
    assert!(code == 0 || code == 2, "{out}");
}

#[test]
fn batch_is_sorted_and_deterministic() {
    let dir = workspace(&[]);
    let batch = dir.path().join("batch");
    fs::create_dir(&batch).unwrap();
    fs::write(batch.join("b.sri"), "sri 3\n1: 2 3\n2: 3 1\n3: 1 2\n").unwrap();
    fs::write(batch.join("a.sri"), "sri 2\n1: 2\n2: 1\n").unwrap();
    let first = run(dir.path(), &["solve", "--batch", "batch"]);
    assert_eq!(first, run(dir.path(), &["solve", "--batch", "batch"]));
    assert_eq!(first.0, 2);
    let a = first.1.find("== a.sri").unwrap();
    let b = first.1.find("== b.sri").unwrap();
    assert!(a < b);
}

#[test]
fn parse_errors_carry_line_numbers() {
    let dir = workspace(&[("bad.sri", "sri 2\n1: 2\n2:\n")]);
    let (code, _, err) = run(dir.path(), &["solve", "bad.sri"]);
    assert_eq!(code, 1);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(run(Path::new("."), &["solve"]).0, 64);
    assert_eq!(run(Path::new("."), &["random", "--n", "5"]).0, 64);
}
