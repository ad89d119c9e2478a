use std::path::{Path, PathBuf};
use std::process::Command;

use hklattice::files::{
    detect_kind, parse_group_file, parse_lattice_file, parse_leech_pair_file, print_group_file, print_lattice_file,
    print_leech_pair_file, FileKind,
};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hklattice")).current_dir(fixtures()).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn fixture_files(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.is_dir() {
            out.extend(fixture_files(&p));
        } else if p.extension().is_some_and(|e| e == "json") {
            out.push(p);
        }
    }
    out.sort();
    out
}

#[test]
fn fixtures_round_trip_through_canonical_printer() {
    let files = fixture_files(&fixtures());
    assert!(files.len() >= 15);
    for p in files {
        if p.ends_with("bad/malformed.json") {
            continue;
        }
        let text = std::fs::read_to_string(&p).unwrap();
        let printed = match detect_kind(&text).unwrap() {
            FileKind::Lattice => print_lattice_file(&parse_lattice_file(&text).unwrap()),
            FileKind::Group => print_group_file(&parse_group_file(&text).unwrap()),
            FileKind::LeechPair => print_leech_pair_file(&parse_leech_pair_file(&text).unwrap()),
        };
        assert_eq!(printed, text, "{}", p.display());
    }
}

#[test]
fn vinberg_example() {
    let (code, out, _) = run(&["vinberg", "ns.json", "--controller", "1,0", "--squares", "-2"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let walls: Vec<&str> = v["walls"].as_array().unwrap().iter().map(|w| w["root"].as_str().unwrap()).collect();
    assert_eq!(walls, ["(0,1)", "(1,-1)"]);
}

#[test]
fn isotropy_example() {
    let (code, out, _) = run(&["isotropy", "n.json", "--p", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"verdict\": \"anisotropic\""));
}

#[test]
fn genus_example() {
    assert_eq!(run(&["genus", "e8.json", "--string"]), (0, "II_(0,8)\n".into(), String::new()));
}

#[test]
fn subcommands_are_deterministic() {
    let cases: &[&[&str]] = &[
        &["info", "k3n3.json"],
        &["disc", "lambda.json"],
        &["genus", "n.json"],
        &["shorts", "a2.json", "--bound", "4"],
        &["typevecs", "k3n3.json", "--sub", "k3n3_minus4.json", "--square", "-4", "--div", "4"],
        &["coinv", "u_swap.json"],
        &["stable", "u_swap.json"],
        &["saturate", "sat_minus_id.json"],
        &["wallcheck", "k3n3_minus4.json"],
        &["embed", "m2.json", "e8.json"],
        &["overlat", "diag_4_m12.json"],
        &["vinberg", "ns.json", "--controller", "1,0", "--squares", "-2", "--scan-words", "6", "--extra", "-1,2"],
        &["isotropy", "n.json", "--all"],
        &["pipeline", "a2_pair.json"],
    ];
    for args in cases {
        let first = run(args);
        assert_eq!(first.0, 0, "{args:?}: {}", first.2);
        assert_eq!(run(args), first, "{args:?}");
    }
}

#[test]
fn failure_fixtures_exit_codes() {
    let (code, _, err) = run(&["info", "bad/degenerate.json"]);
    assert_eq!(code, 1);
    assert!(err.contains("Degenerate"));
    let (code, _, err) = run(&["stable", "bad/non_isometry.json"]);
    assert_eq!(code, 1);
    assert!(err.contains("NotAnIsometry"));
    assert_eq!(run(&["info", "bad/malformed.json"]).0, 2);
    assert_eq!(run(&["info", "missing.json"]).0, 2);
    assert_eq!(run(&["isotropy", "n.json", "--p", "6"]).0, 2);
    assert_eq!(run(&["vinberg", "ns.json", "--controller", "1,x", "--squares", "-2"]).0, 2);
    assert_eq!(run(&["shorts", "ns.json", "--bound", "4"]).0, 1);
    assert_eq!(run(&["isotropy", "n.json"]).0, 2);
}

#[test]
fn pipeline_reports_certified_groups() {
    let (code, out, _) = run(&["pipeline", "a2_pair.json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let orbits = v["orbits"].as_array().unwrap();
    assert!(!orbits.is_empty());
    for o in orbits {
        assert_eq!(o["stable_certificate"], true);
        assert!(o["pex"]["witness"].is_object());
        assert_eq!(o["embedding"]["det_identity"], true);
    }
}
