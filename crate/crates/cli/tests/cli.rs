use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

const ASSETS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../cnl/assets");
const UNIVERSAL: &str = "Every student who works and who is not provably absent is successful.";

fn asset(name: &str) -> PathBuf {
    Path::new(ASSETS).join(name)
}

fn cnlasp(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_cnlasp")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn write(dir: &tempfile::TempDir, name: &str, content: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, content).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn solve_demo() {
    let (code, out, _) = cnlasp(&["solve", asset("engine_demo.lp").to_str().unwrap()]);
    assert_eq!(code, 0);
    let lits: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(out.lines().next(), Some("Answer 1:"));
    assert_eq!(lits.len(), 9);
    assert!(lits.contains(&"-work(mary_ann)"));
    let mut sorted = lits.clone();
    sorted.sort();
    assert_eq!(lits, sorted);
}

#[test]
fn solve_unsat_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let both = fs::read_to_string(asset("engine_demo.lp")).unwrap() + &fs::read_to_string(asset("engine_demo_extra.lp")).unwrap();
    let (code, out, _) = cnlasp(&["solve", &write(&dir, "both.lp", &both)]);
    assert_eq!((code, out.trim()), (1, "UNSAT"));

    let (code, out, _) = cnlasp(&["solve", &write(&dir, "empty.lp", "")]);
    assert_eq!((code, out.as_str()), (0, "Answer 1:\n"));

    let (code, _, err) = cnlasp(&["solve", &write(&dir, "bad.lp", "p(X :- q.")]);
    assert_eq!(code, 2);
    assert!(err.contains("error"));

    let (code, out, _) = cnlasp(&["solve", "--models", "0", &write(&dir, "two.lp", "p :- not q. q :- not p.")]);
    assert_eq!(code, 0);
    assert_eq!(out.matches("Answer").count(), 2);

    assert_eq!(cnlasp(&["solve", "/nonexistent.lp"]).0, 2);
    assert_eq!(cnlasp(&["frobnicate"]).0, 2);
}

#[test]
fn parse_renders_trees() {
    let (code, out, _) = cnlasp(&["parse", "--text", UNIVERSAL]);
    assert_eq!(code, 0);
    assert!(out.starts_with("s(np(det(\"Every\"),\n     n1(noun(\"student\"),\n"));
    assert!(out.ends_with("  pm(\".\"))\n"));

    let (code, out, _) = cnlasp(&["parse", "--text", "John is a student who works."]);
    assert_eq!(code, 0);
    assert!(out.starts_with("s(np(pname(\"John\")),"));

    let (code, out, _) = cnlasp(&["parse", "--text", "student Every works."]);
    assert_eq!((code, out.trim()), (1, "no parse"));
    assert_eq!(cnlasp(&["parse", "--text", "Every sheep works."]).0, 2);
}

#[test]
fn run_text() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = cnlasp(&["run", asset("students.cnl").to_str().unwrap()]);
    assert_eq!(code, 0);
    let model: Vec<&str> = out.lines().filter(|l| l.starts_with("in_AS(")).collect();
    assert_eq!(model.len(), 9);
    assert!(out.starts_with("rule(1).\n"));

    let text = fs::read_to_string(asset("students.cnl")).unwrap() + "Ray is a student. Ray works. Ray cheats.\n";
    let (code, out, _) = cnlasp(&["run", &write(&dir, "ray.cnl", &text)]);
    assert_eq!(code, 1);
    assert!(out.contains("UNSAT\nviolated constraints: 9\n"));

    let (code, out, _) = cnlasp(&["run", &write(&dir, "empty.cnl", "")]);
    assert_eq!((code, out.as_str()), (0, "\n"));

    let (code, out, _) = cnlasp(&["run", "--trace", &write(&dir, "one.cnl", "John works.")]);
    assert_eq!(code, 0);
    assert!(out.contains("% chart of sentence 1"));
    assert!(out.contains("in_AS(lit(func(work), arg(john)))"));
}

#[test]
fn lookahead_table() {
    let (code, out, _) = cnlasp(&["lookahead", "--prefix", "Every student"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("depth 2 (2 fragments)"));
    assert!(out.lines().any(|l| l.starts_with("rp") && l.contains("who")));
    assert!(out.lines().any(|l| l.starts_with("iv") && l.contains("works")));

    let (code, out, _) = cnlasp(&["lookahead"]);
    assert_eq!(code, 0);
    assert!(out.contains("Every") && out.contains("Mary Ann"));

    assert_eq!(cnlasp(&["lookahead", "--prefix", "student Every"]).0, 1);
}

#[test]
fn asset_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let lexicon = fs::read_to_string(asset("lexicon.lp")).unwrap() + "lexicon(pname, \"Zoe\", zoe, sg, n).\n";
    let lex_path = write(&dir, "lexicon.lp", &lexicon);
    let (code, out, _) = cnlasp(&["--lexicon", &lex_path, "parse", "--text", "Zoe works."]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(cnlasp(&["parse", "--text", "Zoe works."]).0, 2);

    write(&dir, "config.toml", "[assets]\nlexicon = \"lexicon.lp\"\n\n[engine]\nsequential = true\nlookahead_depth = 3\n");
    let config = dir.path().join("config.toml");
    let (code, _, _) = cnlasp(&["--config", config.to_str().unwrap(), "parse", "--text", "Zoe works."]);
    assert_eq!(code, 0);

    write(&dir, "bad.toml", "[engine]\nturbo = true\n");
    let bad = dir.path().join("bad.toml");
    assert_eq!(cnlasp(&["--config", bad.to_str().unwrap(), "lookahead"]).0, 2);

    let broken = write(&dir, "grammar.lp", "s(X) :- .");
    assert_eq!(cnlasp(&["--grammar", &broken, "lookahead"]).0, 2);
}
