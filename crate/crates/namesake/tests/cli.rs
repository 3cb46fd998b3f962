use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use namesake::report::{CommonNamesReport, RunReport, Status};
use namesake_core::{corpus_scores, BcubedScores};

const XML: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<!DOCTYPE dblp SYSTEM "dblp.dtd">
<dblp>
<article key="journals/x/1" mdate="2015-01-01">
<author>Wei Li 0001</author><author>Ann Smith</author>
<title>First.</title><journal>J</journal><year>2010</year>
</article>
<inproceedings key="conf/x/2">
<author>Wei Li 0001</author><author>Ann Smith</author><author>Bo Zh&aacute;ng</author>
<title>Second.</title><booktitle>C</booktitle><year>2011</year>
</inproceedings>
<inproceedings key="conf/x/3">
<author>Wei Li 0002</author><author>Carl Jones</author>
<title>Third.</title><booktitle>C</booktitle><year>2012</year>
</inproceedings>
</dblp>
"#;

fn namesake(args: &[&str], stdin: Option<&[u8]>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_namesake"))
        .args(args)
        .env("RUST_LOG", "warn")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut input = child.stdin.take().unwrap();
    if let Some(bytes) = stdin {
        input.write_all(bytes).unwrap();
    }
    drop(input);
    child.wait_with_output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn ingest_writes_canonical_records_and_gold() {
    let dir = tempfile::tempdir().unwrap();
    let xml = dir.path().join("dblp.xml");
    fs::write(&xml, XML).unwrap();
    let out = namesake(&["ingest", s(&xml), "-o", s(dir.path())], None);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let records = fs::read_to_string(dir.path().join("records.jsonl")).unwrap();
    assert_eq!(records.lines().count(), 3);
    assert!(records.contains(r#"{"name":"Bo Zháng","gold_id":null}"#));
    let gold: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("gold.json")).unwrap()).unwrap();
    assert_eq!(
        gold,
        serde_json::json!({"Wei Li": {"Wei Li 0001": ["conf/x/2", "journals/x/1"], "Wei Li 0002": ["conf/x/3"]}})
    );
}

#[test]
fn ingest_reads_gzip_from_stdin() {
    let dir = tempfile::tempdir().unwrap();
    let mut gz = flate2::write::GzEncoder::new(Vec::new(), flate2::Compression::default());
    gz.write_all(XML.as_bytes()).unwrap();
    let packed = gz.finish().unwrap();
    let out = namesake(&["ingest", "-", "-o", s(dir.path())], Some(&packed));
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let plain = tempfile::tempdir().unwrap();
    let xml = plain.path().join("dblp.xml");
    fs::write(&xml, XML).unwrap();
    namesake(&["ingest", s(&xml), "-o", s(plain.path())], None);
    assert_eq!(
        fs::read(dir.path().join("records.jsonl")).unwrap(),
        fs::read(plain.path().join("records.jsonl")).unwrap()
    );
}

#[test]
fn malformed_xml_is_a_data_error_with_offset() {
    let dir = tempfile::tempdir().unwrap();
    let out = namesake(
        &["ingest", "-", "-o", s(dir.path())],
        Some(b"<dblp><article key=\"a\"><author>X</title></article></dblp>"),
    );
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("at byte"));
}

#[test]
fn corpus_without_gold_names_warns() {
    let dir = tempfile::tempdir().unwrap();
    let out = namesake(
        &["ingest", "-", "-o", s(dir.path())],
        Some(b"<dblp><article key=\"a\"><author>X</author></article></dblp>"),
    );
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("gold standard is empty"));
    assert_eq!(
        fs::read_to_string(dir.path().join("gold.json"))
            .unwrap()
            .trim(),
        "{}"
    );
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(code(&namesake(&["run", "--bogus"], None)), 1);
    assert_eq!(code(&namesake(&[], None)), 1);
    assert_eq!(code(&namesake(&["--help"], None)), 0);
    assert_eq!(
        code(&namesake(
            &["run", "--threshold", "2", "--records", "x", "--gold", "y"],
            None
        )),
        1
    );
}

fn synth_corpus(dir: &Path) {
    let out = namesake(
        &[
            "synth",
            "-o",
            s(dir),
            "--blocks",
            "4",
            "--pubs",
            "20-30",
            "--seed",
            "9",
        ],
        None,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn run_reports_aggregate_exactly_and_respect_overrides() {
    let dir = tempfile::tempdir().unwrap();
    synth_corpus(dir.path());
    let records = dir.path().join("records.jsonl");
    let gold = dir.path().join("gold.json");
    let config = dir.path().join("exp.toml");
    fs::write(
        &config,
        format!(
            "records = {:?}\ngold = {:?}\nthresholds = [1]\nsample_count = 3\nseed = 1\n",
            s(&records),
            s(&gold)
        ),
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = namesake(
        &[
            "run",
            "-c",
            s(&config),
            "--threshold",
            "1,3",
            "-o",
            s(&out_dir),
        ],
        None,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: RunReport =
        serde_json::from_str(&fs::read_to_string(out_dir.join("run_report.json")).unwrap())
            .unwrap();
    assert_eq!(report.seed, Some(1));
    assert_eq!(report.blocks, 3);
    assert_eq!(
        report
            .evaluations
            .iter()
            .map(|e| e.threshold)
            .collect::<Vec<_>>(),
        [1, 3]
    );
    for e in &report.evaluations {
        let rows: Vec<BcubedScores> = e
            .per_block
            .iter()
            .map(|b| BcubedScores::new(b.p, b.r, b.f))
            .collect();
        let again = corpus_scores(&rows).unwrap();
        assert_eq!(
            (again.precision, again.recall, again.f),
            (e.corpus.p, e.corpus.r, e.corpus.f)
        );
        let m: u64 = e
            .per_block
            .iter()
            .map(|b| (b.m * (b.m - 1) / 2) as u64)
            .sum();
        assert_eq!(e.comparisons, m);
    }
    let t1 = &report.evaluations[0].corpus;
    let t3 = &report.evaluations[1].corpus;
    assert!(t3.r >= t1.r);

    let table = namesake(&["report", s(&out_dir.join("run_report.json"))], None);
    assert_eq!(code(&table), 0);
    assert!(String::from_utf8_lossy(&table.stdout).contains("precision"));

    // A seed is mandatory for sampling, and the sample cannot exceed the blocks.
    let out = namesake(
        &[
            "run",
            "--records",
            s(&records),
            "--gold",
            s(&gold),
            "-o",
            s(&out_dir),
        ],
        None,
    );
    assert_eq!(code(&out), 1);
    let out = namesake(
        &[
            "run",
            "-c",
            s(&config),
            "--sample-count",
            "5",
            "-o",
            s(&out_dir),
        ],
        None,
    );
    assert_eq!(code(&out), 1);
    let out = namesake(
        &["run", "-c", s(&config), "--records", "/nonexistent"],
        None,
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn snapshot_gives_the_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let xml = dir.path().join("dblp.xml");
    fs::write(&xml, XML).unwrap();
    assert_eq!(
        code(&namesake(
            &["ingest", s(&xml), "-o", s(dir.path()), "--snapshot"],
            None
        )),
        0
    );
    let gold = dir.path().join("gold.json");
    for (source, path, sub) in [
        ("--records", "records.jsonl", "a"),
        ("--graph", "graph.bin", "b"),
    ] {
        let input = dir.path().join(path);
        let out_dir = dir.path().join(sub);
        let out = namesake(
            &[
                "run",
                source,
                s(&input),
                "--gold",
                s(&gold),
                "--all-blocks",
                "-o",
                s(&out_dir),
            ],
            None,
        );
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let ra = fs::read(dir.path().join("a/run_report.json")).unwrap();
    assert_eq!(ra, fs::read(dir.path().join("b/run_report.json")).unwrap());
    let report: RunReport = serde_json::from_slice(&ra).unwrap();
    // Both Wei Li authors are split at threshold 1: precision 1, and the
    // 0001 pair shares Ann Smith.
    assert_eq!(report.evaluations[0].corpus.p, 1.0);
    assert_eq!(report.evaluations[0].corpus.r, 1.0);
}

#[test]
fn common_names_without_qualifying_blocks_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    synth_corpus(dir.path());
    let out = namesake(
        &[
            "common-names",
            "--records",
            s(&dir.path().join("records.jsonl")),
            "--gold",
            s(&dir.path().join("gold.json")),
            "--all-blocks",
            "-o",
            s(dir.path()),
        ],
        None,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: CommonNamesReport =
        serde_json::from_str(&fs::read_to_string(dir.path().join("common_names.json")).unwrap())
            .unwrap();
    assert_eq!(report.status, Status::Empty);
    assert!(report.before.is_none());

    let out = namesake(
        &[
            "common-names",
            "--records",
            s(&dir.path().join("records.jsonl")),
            "--gold",
            s(&dir.path().join("gold.json")),
            "--all-blocks",
            "--min-block-size",
            "10",
            "-o",
            s(dir.path()),
        ],
        None,
    );
    assert_eq!(code(&out), 0);
    let report: CommonNamesReport =
        serde_json::from_str(&fs::read_to_string(dir.path().join("common_names.json")).unwrap())
            .unwrap();
    assert_eq!(report.status, Status::Ok);
    assert_eq!(report.blocks, 4);
    let communities: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("communities.json")).unwrap())
            .unwrap();
    assert!(communities[0].get("Q_after").is_some());
}

#[test]
fn synth_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    synth_corpus(a.path());
    synth_corpus(b.path());
    for f in ["records.jsonl", "gold.json"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap()
        );
    }
}
