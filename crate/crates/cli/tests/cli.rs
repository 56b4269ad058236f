use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_accentdl"));
    c.env_remove("ACCENT_CONFIG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn french_corpus(dir: &TempDir) -> PathBuf {
    let mut text = String::new();
    for _ in 0..30 {
        text.push_str("la côte ouest est belle .\nune cote de popularité .\n");
    }
    let path = dir.path().join("fr.txt");
    fs::write(&path, text).unwrap();
    path
}

fn trained(dir: &TempDir) -> PathBuf {
    let corpus = french_corpus(dir);
    let model = dir.path().join("fr.model");
    let o = run(&["train", "--lang", "fr", "-m", p(&model), p(&corpus)]);
    assert!(o.status.success(), "{}", stderr(&o));
    model
}

#[test]
fn train_then_restore() {
    let dir = TempDir::new().unwrap();
    let model = trained(&dir);
    let o = run_stdin(&["restore", "-m", p(&model)], "La cote ouest, une cote.\n");
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "La côte ouest, une cote.\n");

    let o = run_stdin(&["restore", "-m", p(&model)], "");
    assert!(o.status.success());
    assert_eq!(stdout(&o), "");
}

#[test]
fn restore_files_and_trace() {
    let dir = TempDir::new().unwrap();
    let model = trained(&dir);
    let input = dir.path().join("in.txt");
    let output = dir.path().join("out.txt");
    fs::write(&input, "la cote ouest\n").unwrap();
    let o = run(&["restore", "-m", p(&model), "--trace", p(&input), "-o", p(&output)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(&output).unwrap(), "la côte ouest\n");
    assert_eq!(stdout(&o), "");
    let trace = stderr(&o);
    let fields: Vec<&str> = trace.trim_end().split('\t').collect();
    assert_eq!(fields.len(), 5, "{trace}");
    assert_eq!(fields[0], "3");
    assert_eq!(fields[1], "cote");
    assert_eq!(fields[4], "côte");
}

#[test]
fn trust_existing_keeps_accented_words() {
    let dir = TempDir::new().unwrap();
    let model = trained(&dir);
    let o = run_stdin(&["restore", "-m", p(&model), "--trust-existing"], "une côte\n");
    assert_eq!(stdout(&o), "une côte\n");
    let o = run_stdin(&["restore", "-m", p(&model)], "une côte\n");
    assert_eq!(stdout(&o), "une cote\n");
}

#[test]
fn train_summary_and_inspect() {
    let dir = TempDir::new().unwrap();
    let corpus = french_corpus(&dir);
    let model = dir.path().join("m");
    let o = run(&["train", "--lang", "fr", "-k", "4", "-m", p(&model), p(&corpus)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("ambiguous keys\t1\n"), "{}", stdout(&o));

    let o = run(&["inspect", "-m", p(&model), "cote"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("cote: "), "{out}");
    assert!(out.contains("window ±4"));
    assert!(out.contains("DEFAULT"));
    let lls: Vec<f64> = out
        .lines()
        .skip(2)
        .filter_map(|l| l.split_whitespace().next()?.parse().ok())
        .collect();
    assert!(!lls.is_empty());
    assert!(lls.windows(2).all(|w| w[0] >= w[1]), "{lls:?}");

    let o = run(&["inspect", "-m", p(&model), "ouest"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "ouest: unambiguous, always `ouest`\n");
}

#[test]
fn inspect_unknown_word_suggests_neighbours() {
    let dir = TempDir::new().unwrap();
    let model = trained(&dir);
    let o = run(&["inspect", "-m", p(&model), "cotx"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).is_empty());
    assert!(stderr(&o).contains("nearest: cote"), "{}", stderr(&o));
}

#[test]
fn hand_edited_model_is_used() {
    let dir = TempDir::new().unwrap();
    let model = trained(&dir);
    let text = fs::read_to_string(&model).unwrap();
    let edited: String = text
        .lines()
        .map(|l| {
            // flip the first `la _` entry
            if l.contains("\tword\t-1\tla\t") {
                l.replace("\tcôte\t", "\tcote\t")
            } else {
                l.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
        + "\n";
    assert_ne!(edited, text);
    fs::write(&model, edited).unwrap();
    let o = run_stdin(&["restore", "-m", p(&model), "--trace"], "la cote\n");
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "la cote\n");
}

#[test]
fn malformed_model_reports_line() {
    let dir = TempDir::new().unwrap();
    let model = trained(&dir);
    let text = fs::read_to_string(&model).unwrap();
    let line = text.lines().position(|l| l.starts_with("default\t")).unwrap() + 1;
    fs::write(&model, text.replace("default\t", "defualt\t")).unwrap();
    let o = run_stdin(&["restore", "-m", p(&model)], "la cote\n");
    assert_eq!(o.status.code(), Some(5));
    assert!(stderr(&o).contains(&format!(":{line}:")), "{}", stderr(&o));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let corpus = french_corpus(&dir);
    let model = dir.path().join("m");
    let empty = dir.path().join("empty.txt");
    fs::write(&empty, " \n\n").unwrap();
    let missing = dir.path().join("missing.txt");

    let code = |args: &[&str]| run(args).status.code();
    assert_eq!(code(&["train", "--alpha", "0", "-m", p(&model), p(&corpus)]), Some(6));
    assert_eq!(code(&["train", "--beta-gamma", "0.5,0.6", "-m", p(&model), p(&corpus)]), Some(6));
    assert_eq!(code(&["train", "--prune-cv", "maybe", "-m", p(&model), p(&corpus)]), Some(2));
    assert_eq!(code(&["train", "-m", p(&model), p(&empty)]), Some(4));
    assert_eq!(code(&["train", "-m", p(&model), p(&missing)]), Some(3));
    assert_eq!(code(&["eval", "--folds", "1", p(&corpus)]), Some(2));
    assert_eq!(code(&["restore", "-m", p(&missing)]), Some(3));
    assert_eq!(code(&["frobnicate"]), Some(2));
}

#[test]
fn non_utf8_input_is_rejected() {
    let dir = TempDir::new().unwrap();
    let model = trained(&dir);
    let input = dir.path().join("latin1.txt");
    fs::write(&input, b"la c\xf4te\n").unwrap();
    let o = run(&["restore", "-m", p(&model), p(&input)]);
    assert_eq!(o.status.code(), Some(5));
    assert!(stderr(&o).contains("byte offset 4"), "{}", stderr(&o));
}

#[test]
fn no_ambiguity_warns() {
    let dir = TempDir::new().unwrap();
    let corpus = dir.path().join("c.txt");
    fs::write(&corpus, "el perro come pan\n").unwrap();
    let model = dir.path().join("m");
    let o = run(&["train", "--lang", "es", "-m", p(&model), p(&corpus)]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("warning: corpus has no ambiguous words"), "{}", stderr(&o));
    assert!(!fs::read_to_string(&model).unwrap().contains("[LIST]"));
}

fn planted(dir: &TempDir, noise: &str) -> PathBuf {
    let path = dir.path().join("planted.txt");
    let o = run(&[
        "synth",
        "--keys",
        "4",
        "--occurrences",
        "1200",
        "--noise",
        noise,
        "-o",
        p(&path),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    // key list goes to stderr
    assert_eq!(stderr(&o).lines().count(), 4);
    path
}

#[test]
fn planted_model_leads_with_trigger() {
    let dir = TempDir::new().unwrap();
    let corpus = planted(&dir, "0");
    let model = dir.path().join("m");
    assert!(run(&["train", "--lang", "es", "-m", p(&model), p(&corpus)]).status.success());
    let o = run(&["inspect", "-m", p(&model), "kabara"]);
    let out = stdout(&o);
    let top = out.lines().nth(2).unwrap();
    assert!(top.contains("teb (within ±k words)") || top.contains("tub (within ±k words)"), "{out}");
}

fn ambiguous_agreement(report: &str) -> f64 {
    let line = report.lines().find(|l| l.starts_with("ambiguous tokens")).unwrap();
    let pct = line.split_whitespace().nth(3).unwrap();
    pct.trim_end_matches('%').parse::<f64>().unwrap() / 100.0
}

#[test]
fn eval_planted_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let corpus = planted(&dir, "0");
    let tsv = dir.path().join("r.tsv");
    let args = ["eval", "--lang", "es", "--seed", "7", "--report", p(&tsv), p(&corpus)];
    let a = run(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    let b = run(&args);
    assert_eq!(stdout(&a), stdout(&b));
    assert!(ambiguous_agreement(&stdout(&a)) >= 0.99, "{}", stdout(&a));
    let tsv = fs::read_to_string(&tsv).unwrap();
    assert_eq!(tsv.lines().count(), 5, "{tsv}");
}

#[test]
fn eval_compare_table() {
    let dir = TempDir::new().unwrap();
    let corpus = planted(&dir, "0.05");
    let o = run(&["eval", "--lang", "es", "--folds", "3", "--compare", p(&corpus)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("sign test"), "{}", stdout(&o));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = TempDir::new().unwrap();
    let corpus = french_corpus(&dir);
    let cfg = dir.path().join("accent.toml");
    fs::write(&cfg, "lang = \"fr\"\nwindow = 3\n").unwrap();
    let model = dir.path().join("m");
    let o = bin()
        .env("ACCENT_CONFIG", &cfg)
        .args(["train", "-m", p(&model), p(&corpus)])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let o = run(&["inspect", "-m", p(&model), "cote"]);
    assert!(stdout(&o).contains("window ±3"), "{}", stdout(&o));

    // flags win over the file
    let o = bin()
        .env("ACCENT_CONFIG", &cfg)
        .args(["train", "-k", "5", "-m", p(&model), p(&corpus)])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(stdout(&run(&["inspect", "-m", p(&model), "cote"])).contains("window ±5"));

    fs::write(&cfg, "lang = \"fr\"\nwindw = 3\n").unwrap();
    let o = bin()
        .env("ACCENT_CONFIG", &cfg)
        .args(["train", "-m", p(&model), p(&corpus)])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(6));
}
