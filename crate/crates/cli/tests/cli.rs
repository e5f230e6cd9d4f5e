use std::path::Path;
use std::process::{Command, Output};

fn topicgrid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_topicgrid"))
        .args(args)
        .output()
        .expect("spawn topicgrid")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const LEXICON: &str = concat!(
    r#"{"surface": "AB", "source": "topic", "clues": ["The [Answer] index rose."]}"#,
    "\n",
    r#"{"surface": "AC", "source": "topic", "clues": ["[Answer] talks resumed."]}"#,
    "\n",
    r#"{"surface": "CD", "source": "filler"}"#,
    "\n",
    r#"{"surface": "BD", "source": "filler"}"#,
    "\n",
);

#[test]
fn generate_verify_render() {
    let dir = tempfile::tempdir().unwrap();
    let lex = write(dir.path(), "lex.jsonl", LEXICON);
    let pattern = write(dir.path(), "square.txt", "id: square\n..\n..\n");
    let puzzle = dir.path().join("p.json");
    let puzzle = puzzle.to_str().unwrap();

    let out = topicgrid(&["generate", "--pattern", &pattern, "--lexicon", &lex, "-T", "50", "--out", puzzle]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let out = topicgrid(&["verify", "--puzzle", puzzle, "--lexicon", &lex]);
    assert_eq!(out.status.code(), Some(0));

    let out = topicgrid(&["render", "--puzzle", puzzle, "--solution"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("AB\nCD\n\nACROSS\n1. The [Answer] index rose. (2)\n"));

    // The lexicon tags AB as Filler here, so the 50% quota is no longer met.
    let filler = write(dir.path(), "filler.txt", "AB\nAC\nCD\nBD\n");
    let out = topicgrid(&["verify", "--puzzle", puzzle, "--lexicon", &filler]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let filler = write(dir.path(), "filler.txt", "AB\nCD\nAC\nBD\n");
    let pattern = write(dir.path(), "square.txt", "..\n..\n");
    let out_path = dir.path().join("never.json");
    let out_path = out_path.to_str().unwrap();

    let out = topicgrid(&["generate", "--pattern", &pattern, "--lexicon", &filler, "-T", "100", "--out", out_path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exhausted"));
    assert!(!Path::new(out_path).exists(), "no output on failure");

    let out = topicgrid(&["generate", "--pattern", &pattern, "--lexicon", &filler, "-T", "101"]);
    assert_eq!(out.status.code(), Some(2));
    let out = topicgrid(&["generate", "--pattern", &pattern, "--lexicon", &filler, "--restart-interval", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = topicgrid(&["generate", "--lexicon", &filler]);
    assert_eq!(out.status.code(), Some(2));
    let out = topicgrid(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));

    let out = topicgrid(&["generate", "--pattern", "/nonexistent/p.txt", "--lexicon", &filler]);
    assert_eq!(out.status.code(), Some(3));
    let bad = write(dir.path(), "bad.txt", "..x\n");
    let out = topicgrid(&["generate", "--pattern", &bad, "--lexicon", &filler]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn patterns_and_ingest() {
    let dir = tempfile::tempdir().unwrap();
    let out = topicgrid(&["patterns", "--size", "7x7", "--black", "11", "--count", "3", "--seed", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let patterns = topicgrid::grid::parse_pattern_file(&text).unwrap();
    assert_eq!(patterns.len(), 3);
    assert!(patterns.iter().all(|p| p.black_count() == 11));

    let corpus = write(
        dir.path(),
        "corpus.jsonl",
        concat!(
            r#"{"doc_id": "a", "text": "Shares of Roomba maker rose on Friday. Tokyo markets were calm."}"#,
            "\n",
            r#"{"doc_id": "b", "text": "A liberal coalition formed in Tokyo this week."}"#,
            "\n",
        ),
    );
    let gazetteer = write(dir.path(), "terms.txt", "Roomba\nTokyo\nliberal\n");
    let out = topicgrid(&["ingest", "--corpus", &corpus, "--gazetteer", &gazetteer]);
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<serde_json::Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let surfaces: Vec<&str> = lines.iter().map(|v| v["surface"].as_str().unwrap()).collect();
    assert_eq!(surfaces, ["liberal", "Roomba", "Tokyo"]);
    assert_eq!(lines[2]["clues"].as_array().unwrap().len(), 2);

    // Without a gazetteer the corpus must carry its own keyword spans.
    let out = topicgrid(&["ingest", "--corpus", &corpus]);
    assert_eq!(out.status.code(), Some(3));
}
