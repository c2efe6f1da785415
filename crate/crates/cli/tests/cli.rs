use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use embalign::io::{EmbeddingCorpus, EmbeddingHeader, Encoding, Level, SentenceEmbedding};
use embalign::EmbeddingMatrix;

const DIM: usize = 8;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_embalign"))
}

fn run(args: &[&str]) -> Output {
    let out = bin().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn vector(seed: usize) -> Vec<f32> {
    (0..DIM)
        .map(|d| ((seed * 13 + d * 7) as f32 * 0.37).sin())
        .collect()
}

fn sentence(id: &str, prefix: &str, rows: Vec<Vec<f32>>) -> SentenceEmbedding {
    SentenceEmbedding {
        id: id.into(),
        tokens: (0..rows.len()).map(|k| format!("{prefix}{k}")).collect(),
        spans: None,
        matrix: EmbeddingMatrix::from_rows(&rows).unwrap(),
    }
}

struct Fixture {
    dir: tempfile::TempDir,
}

impl Fixture {
    /// Ten pairs. The target reverses the source word order with a little
    /// noise, so gold (1-based) links source word `k` to target `n - 1 - k`.
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let mut src = Vec::new();
        let mut tgt = Vec::new();
        let mut gold = String::new();
        for p in 0..10 {
            let n = 3 + p % 4;
            let words: Vec<Vec<f32>> = (0..n).map(|k| vector(p * 10 + k)).collect();
            let rev: Vec<Vec<f32>> = words
                .iter()
                .rev()
                .enumerate()
                .map(|(k, v)| {
                    v.iter()
                        .zip(vector(500 + p * 10 + k))
                        .map(|(a, b)| a + 0.2 * b)
                        .collect()
                })
                .collect();
            src.push(sentence(&p.to_string(), "s", words));
            tgt.push(sentence(&p.to_string(), "t", rev));
            let items: Vec<String> = (0..n).map(|k| format!("{}-{}", k + 1, n - k)).collect();
            gold.push_str(&items.join(" "));
            gold.push('\n');
        }
        let corpus = |sentences| EmbeddingCorpus {
            header: EmbeddingHeader::new(DIM, Level::Word),
            sentences,
        };
        corpus(src)
            .save(dir.path().join("src.emb"), Encoding::Binary)
            .unwrap();
        corpus(tgt)
            .save(dir.path().join("tgt.emb"), Encoding::Text)
            .unwrap();
        fs::write(dir.path().join("gold.txt"), gold).unwrap();
        Fixture { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn p(&self, name: &str) -> String {
        self.path(name).to_str().unwrap().to_string()
    }
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .unwrap();
    r.records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect()
}

fn column(rows: &[Vec<String>], row: usize, name: &str) -> String {
    let k = rows[0]
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    rows[row][k].clone()
}

#[test]
fn align_output_is_identical_across_runs_and_workers() {
    let f = Fixture::new();
    for method in ["argmax", "itermax", "match"] {
        let mut outputs = Vec::new();
        for workers in ["1", "4", "1", "4"] {
            let out = run(&[
                "align",
                "--src",
                &f.p("src.emb"),
                "--tgt",
                &f.p("tgt.emb"),
                "--method",
                method,
                "--workers",
                workers,
                "--dist",
                "--null",
            ]);
            outputs.push(out.stdout);
        }
        assert!(outputs.windows(2).all(|w| w[0] == w[1]), "{method}");
        assert_eq!(String::from_utf8_lossy(&outputs[0]).lines().count(), 10);
    }
}

#[test]
fn align_with_gold_writes_score_csv() {
    let f = Fixture::new();
    run(&[
        "align",
        "--src",
        &f.p("src.emb"),
        "--tgt",
        &f.p("tgt.emb"),
        "--gold",
        &f.p("gold.txt"),
        "--out",
        &f.p("pred.txt"),
        "--report",
        &f.p("report.csv"),
    ]);
    let rows = csv_rows(&f.path("report.csv"));
    assert_eq!(rows.len(), 2);
    for col in ["precision", "recall", "f1", "aer"] {
        let v: f64 = column(&rows, 1, col).parse().unwrap();
        assert!((0.0..=1.0).contains(&v));
    }
    let f1: f64 = column(&rows, 1, "f1").parse().unwrap();
    assert!(f1 > 0.9, "reversal fixture should be easy: {f1}");

    // Scoring the written file reproduces the same numbers.
    run(&[
        "score",
        "--pred",
        &f.p("pred.txt"),
        "--gold",
        &f.p("gold.txt"),
        "--out",
        &f.p("score.csv"),
    ]);
    let again = csv_rows(&f.path("score.csv"));
    assert_eq!(rows[1][1..], again[1][1..]);
}

#[test]
fn f32_and_f64_agree_on_fixture() {
    let f = Fixture::new();
    let args = |p: &'static str| {
        vec![
            "align".to_string(),
            "--src".into(),
            f.p("src.emb"),
            "--tgt".into(),
            f.p("tgt.emb"),
            "--precision".into(),
            p.into(),
        ]
    };
    let a = bin().args(args("f32")).output().unwrap();
    let b = bin().args(args("f64")).output().unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn symmetrize_modes() {
    let f = Fixture::new();
    fs::write(f.path("fwd.txt"), "0-1\n0-0 1-1\n").unwrap();
    fs::write(f.path("bwd.txt"), "1-0\n0-0\n").unwrap();
    let out = |mode: &str| {
        String::from_utf8(
            run(&[
                "symmetrize",
                "--fwd",
                &f.p("fwd.txt"),
                "--bwd",
                &f.p("bwd.txt"),
                "--mode",
                mode,
            ])
            .stdout,
        )
        .unwrap()
    };
    assert_eq!(out("gdfa"), "0-1 1-0\n0-0 1-1\n");
    assert_eq!(out("intersect"), "\n0-0\n");
    assert_eq!(out("union"), "0-1 1-0\n0-0 1-1\n");

    // Backward file in target-source order.
    fs::write(f.path("bwd_t.txt"), "0-1\n0-0\n").unwrap();
    let t = run(&[
        "symmetrize",
        "--fwd",
        &f.p("fwd.txt"),
        "--bwd",
        &f.p("bwd_t.txt"),
        "--transpose-bwd",
        "--mode",
        "intersect",
    ]);
    assert_eq!(String::from_utf8(t.stdout).unwrap(), "\n0-0\n");
}

#[test]
fn sweep_over_n_max_and_layers() {
    let f = Fixture::new();
    run(&[
        "sweep",
        "--src",
        &f.p("src.emb"),
        "--tgt",
        &f.p("tgt.emb"),
        "--gold",
        &f.p("gold.txt"),
        "--method",
        "itermax",
        "--axis",
        "n-max",
        "--values",
        "1,2,3",
        "--out",
        &f.p("sweep.csv"),
    ]);
    let rows = csv_rows(&f.path("sweep.csv"));
    assert_eq!(rows.len(), 4);
    assert_eq!(column(&rows, 1, "axis"), "n-max");
    assert_eq!(column(&rows, 3, "n_max"), "3");

    run(&[
        "align",
        "--src",
        &f.p("src.emb"),
        "--tgt",
        &f.p("tgt.emb"),
        "--gold",
        &f.p("gold.txt"),
        "--out",
        &f.p("pred.txt"),
        "--report",
        &f.p("argmax.csv"),
    ]);
    let argmax = csv_rows(&f.path("argmax.csv"));
    for col in ["precision", "recall", "f1", "aer"] {
        assert_eq!(column(&rows, 1, col), column(&argmax, 1, col));
    }

    let layer = |label: &str| format!("{label}:{}:{}", f.p("src.emb"), f.p("tgt.emb"));
    run(&[
        "sweep",
        "--gold",
        &f.p("gold.txt"),
        "--layer",
        &layer("4"),
        "--layer",
        &layer("8"),
        "--out",
        &f.p("layers.csv"),
    ]);
    let rows = csv_rows(&f.path("layers.csv"));
    assert_eq!(rows.len(), 3);
    assert_eq!(
        (
            column(&rows, 1, "axis").as_str(),
            column(&rows, 2, "value").as_str()
        ),
        ("layer", "8")
    );
}

#[test]
fn frequency_and_tag_bins() {
    let f = Fixture::new();
    run(&[
        "align",
        "--src",
        &f.p("src.emb"),
        "--tgt",
        &f.p("tgt.emb"),
        "--out",
        &f.p("pred.txt"),
    ]);
    let gold = fs::read_to_string(f.path("gold.txt")).unwrap();
    let mut src_text = String::new();
    let mut tgt_text = String::new();
    let mut src_tags = String::new();
    let mut tgt_tags = String::new();
    for line in gold.lines() {
        let n = line.split_whitespace().count();
        let words: Vec<String> = (0..n).map(|k| format!("w{k}")).collect();
        src_text += &(words.join(" ") + "\n");
        tgt_text += &(words.iter().rev().cloned().collect::<Vec<_>>().join(" ") + "\n");
        let tags: Vec<&str> = (0..n).map(|k| if k == 0 { "NOUN" } else { "X" }).collect();
        src_tags += &(tags.join(" ") + "\n");
        tgt_tags += &(tags.iter().rev().copied().collect::<Vec<_>>().join(" ") + "\n");
    }
    for (name, body) in [
        ("src.txt", &src_text),
        ("tgt.txt", &tgt_text),
        ("src.tags", &src_tags),
        ("tgt.tags", &tgt_tags),
    ] {
        fs::write(f.path(name), body).unwrap();
    }

    run(&[
        "bins",
        "--mode",
        "freq",
        "--pred",
        &f.p("pred.txt"),
        "--gold",
        &f.p("gold.txt"),
        "--src-text",
        &f.p("src.txt"),
        "--tgt-text",
        &f.p("tgt.txt"),
        "--bounds",
        "0,5,10",
        "--out",
        &f.p("freq.csv"),
    ]);
    let rows = csv_rows(&f.path("freq.csv"));
    let bins: Vec<String> = rows[1..].iter().map(|r| r[0].clone()).collect();
    assert_eq!(bins, ["[0,5)", "[5,10)", "[10,inf)"]);

    run(&[
        "bins",
        "--mode",
        "tag",
        "--pred",
        &f.p("pred.txt"),
        "--gold",
        &f.p("gold.txt"),
        "--src-tags",
        &f.p("src.tags"),
        "--tgt-tags",
        &f.p("tgt.tags"),
        "--out",
        &f.p("tags.csv"),
    ]);
    let rows = csv_rows(&f.path("tags.csv"));
    let tags: Vec<String> = rows[1..].iter().map(|r| r[0].clone()).collect();
    assert_eq!(tags, ["NOUN", "X"]);
}

#[test]
fn convert_round_trips_through_text() {
    let f = Fixture::new();
    run(&[
        "convert",
        "--input",
        &f.p("src.emb"),
        "--output",
        &f.p("src.txt"),
        "--encoding",
        "text",
    ]);
    run(&[
        "convert",
        "--input",
        &f.p("src.txt"),
        "--output",
        &f.p("src2.emb"),
    ]);
    assert_eq!(
        fs::read(f.path("src.emb")).unwrap(),
        fs::read(f.path("src2.emb")).unwrap()
    );
}

#[test]
fn mismatched_ids_are_reported() {
    let f = Fixture::new();
    let mut tgt = EmbeddingCorpus::load(f.path("tgt.emb")).unwrap();
    tgt.sentences[3].id = "other".into();
    tgt.save(f.path("bad.emb"), Encoding::Binary).unwrap();
    let out = bin()
        .args(["align", "--src", &f.p("src.emb"), "--tgt", &f.p("bad.emb")])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("other"), "{err}");
}

#[test]
fn invalid_config_is_rejected() {
    let f = Fixture::new();
    let out = bin()
        .args([
            "align",
            "--src",
            &f.p("src.emb"),
            "--tgt",
            &f.p("tgt.emb"),
            "--alpha",
            "1.5",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
