//! Byte-for-byte comparison of command output with stored reports.
//! Set `UPDATE_GOLDEN=1` to rewrite the files.

use essimg_cli::run;
use std::path::PathBuf;

/// (file stem, arguments after the program name)
const CASES: &[(&str, &[&str])] = &[
    ("EX1A.analyze", &["analyze", "EX1A"]),
    ("COUNT2.analyze", &["analyze", "COUNT2"]),
    ("ROT3.analyze", &["analyze", "ROT3"]),
    ("COLLAPSE.analyze", &["analyze", "COLLAPSE"]),
    ("GRID2.analyze", &["analyze", "GRID2"]),
    ("GRID3.analyze", &["analyze", "GRID3"]),
    ("GRID4.analyze", &["analyze", "GRID4"]),
    ("ID_TRIVIAL.validate", &["validate", "ID_TRIVIAL"]),
    ("ID_TRIVIAL.image", &["image", "ID_TRIVIAL", "--set", "A"]),
    ("EX1A.image", &["image", "EX1A", "--set", "A1"]),
    ("EX1A.validate", &["validate", "EX1A"]),
    ("ROT3.separated", &["separated", "ROT3", "--a", "A", "--b", "B"]),
    ("ROT3.hull", &["hull", "ROT3", "--set", "A", "--kind", "tail"]),
    ("COUNT2.corridor", &["corridor", "COUNT2", "--set", "X"]),
    ("COUNT2.corridor_verify", &["corridor", "COUNT2", "--set", "X", "--verify", "tests/data/COUNT2.terms"]),
    ("COUNT2.corridor_shifted", &["corridor", "COUNT2", "--set", "X", "--verify", "tests/data/COUNT2.shifted.terms"]),
    ("COUNT2.hull", &["hull", "COUNT2", "--set", "B", "--kind", "tail"]),
    ("COUNT2.not_tail", &["corridor", "COUNT2", "--set", "B"]),
    ("COUNT2.image", &["image", "COUNT2", "--set", "B"]),
    ("COLLAPSE.hull", &["hull", "COLLAPSE", "--set", "A", "--kind", "forward"]),
    ("GRID2.image2", &["image", "GRID2", "--set", "BOTTOM", "--power", "2"]),
    ("MARKOV2.markov", &["markov", "MARKOV2", "--depth", "2", "--cylinder", "1", "--verify-formulas"]),
    ("MARKOV2.markov3", &["markov", "MARKOV2", "--depth", "3"]),
    ("CSMC_A.markov", &["markov", "CSMC_A", "--depth", "2"]),
    ("CSMC_B.markov", &["markov", "CSMC_B", "--depth", "2"]),
    ("ROT3.oracle", &["oracle", "ROT3", "--mode", "separated_pairs"]),
    ("COLLAPSE.oracle", &["oracle", "COLLAPSE", "--mode", "nonsingular_max"]),
    ("EX1A.modulus", &["modulus", "EX1A", "--epsilon", "1/2"]),
    ("ROT3.modulus", &["modulus", "ROT3", "--epsilon", "1/5", "--normalize"]),
    ("COUNT2.modulus", &["modulus", "COUNT2", "--epsilon", "1/2"]),
    ("ROT3.json", &["--format", "json", "analyze", "ROT3"]),
    ("GRID2.json", &["--format", "json", "analyze", "GRID2"]),
];

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn render(args: &[&str]) -> String {
    let out = run(std::iter::once("essimg").chain(args.iter().copied()));
    format!("exit: {}\n{}{}", out.code, out.stdout, out.stderr)
}

#[test]
fn reports_match_golden_files() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut mismatched = Vec::new();
    for (stem, args) in CASES {
        let path = golden_dir().join(format!("{stem}.txt"));
        let got = render(args);
        if update {
            std::fs::create_dir_all(golden_dir()).unwrap();
            std::fs::write(&path, &got).unwrap();
            continue;
        }
        let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        if got != want {
            eprintln!("--- {stem} expected\n{want}--- got\n{got}");
            mismatched.push(*stem);
        }
    }
    assert!(mismatched.is_empty(), "mismatched: {mismatched:?}");
}

#[test]
fn repeated_runs_are_identical() {
    for (_, args) in CASES {
        assert_eq!(render(args), render(args), "{args:?}");
    }
}
