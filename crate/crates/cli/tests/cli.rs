use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_knowref");

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn knowref(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .env_remove("KNOWREF_SEED")
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = knowref(dir, args);
    assert!(
        out.status.success(),
        "knowref {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

/// ingest -> mine -> label -> augment in `dir`, with extra global flags.
fn pipeline(dir: &Path, extra: &[&str]) {
    std::fs::copy(fixture("raw.txt"), dir.join("raw.txt")).unwrap();
    let steps: [&[&str]; 4] = [
        &["ingest", "--in", "raw.txt", "--out", "sents.tsv", "--rejections", "ingest.rej"],
        &["mine", "--in", "sents.tsv", "--out", "mined.jsonl", "--rejections", "mine.rej"],
        &["label", "--in", "mined.jsonl", "--out", "labeled.jsonl", "--neutralize", "--abstentions", "abst.tsv"],
        &["augment", "--in", "labeled.jsonl", "--out", "aug.jsonl"],
    ];
    for step in steps {
        let args: Vec<&str> = step.iter().chain(extra).copied().collect();
        ok(dir, &args);
    }
}

const ARTIFACTS: &[&str] = &[
    "sents.tsv",
    "sents.tsv.manifest.json",
    "mined.jsonl",
    "mined.jsonl.manifest.json",
    "mine.rej",
    "labeled.jsonl",
    "labeled.jsonl.manifest.json",
    "abst.tsv",
    "aug.jsonl",
    "aug.jsonl.manifest.json",
];

#[test]
fn pipeline_is_byte_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    pipeline(a.path(), &["--seed", "11"]);
    pipeline(b.path(), &["--seed", "11", "--jobs", "4"]);
    for name in ARTIFACTS {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name} differs");
    }
    assert_eq!(read(a.path(), "mined.jsonl").lines().count(), 10);
    assert_eq!(read(a.path(), "labeled.jsonl").lines().count(), 9);
    assert_eq!(read(a.path(), "aug.jsonl").lines().count(), 18);
}

#[test]
fn seed_changes_neutralized_names_and_env_is_a_fallback() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    pipeline(a.path(), &["--seed", "11"]);
    pipeline(b.path(), &["--seed", "12"]);
    assert_ne!(read(a.path(), "labeled.jsonl"), read(b.path(), "labeled.jsonl"));

    std::fs::copy(a.path().join("mined.jsonl"), c.path().join("mined.jsonl")).unwrap();
    let out = Command::new(BIN)
        .args(["label", "--in", "mined.jsonl", "--out", "labeled.jsonl", "--neutralize", "--abstentions", "abst.tsv"])
        .current_dir(c.path())
        .env("KNOWREF_SEED", "11")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(read(a.path(), "labeled.jsonl"), read(c.path(), "labeled.jsonl"));
}

#[test]
fn manifest_counts_never_grow() {
    let dir = tempfile::tempdir().unwrap();
    pipeline(dir.path(), &[]);
    let mut counts = Vec::new();
    for name in ["sents.tsv.manifest.json", "mined.jsonl.manifest.json"] {
        let m: Value = serde_json::from_str(&read(dir.path(), name)).unwrap();
        assert_eq!(m["config_hash"].as_str().unwrap().len(), 64);
        for stage in m["stages"].as_array().unwrap() {
            let input = stage["input_records"].as_u64().unwrap();
            let output = stage["output_records"].as_u64().unwrap();
            let dropped: u64 = stage["rejections"].as_object().unwrap().values().map(|v| v.as_u64().unwrap()).sum();
            if stage["name"] != "split" {
                assert_eq!(input, output + dropped, "{stage}");
            }
            counts.push(output);
        }
    }
    assert!(counts.windows(2).all(|w| w[0] >= w[1]), "{counts:?}");
    let m: Value = serde_json::from_str(&read(dir.path(), "labeled.jsonl.manifest.json")).unwrap();
    assert_eq!(m["stages"][0]["rejections"]["SameGender"], 1);
}

#[test]
fn no_temporary_files_are_left_behind() {
    let dir = tempfile::tempdir().unwrap();
    pipeline(dir.path(), &[]);
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    let mut expected: Vec<String> = ARTIFACTS
        .iter()
        .chain(&["raw.txt", "ingest.rej"])
        .map(|s| s.to_string())
        .collect();
    expected.sort();
    assert_eq!(names, expected);
}

#[test]
fn validate_reports_offending_id() {
    let dir = tempfile::tempdir().unwrap();
    pipeline(dir.path(), &[]);
    ok(dir.path(), &["validate", "--corpus", "labeled.jsonl"]);

    let mut v: Value = serde_json::from_str(read(dir.path(), "labeled.jsonl").lines().next().unwrap()).unwrap();
    let id = v["id"].as_str().unwrap().to_string();
    let (c1, c2) = (v["c1"].clone(), v["c2"].clone());
    v["c1"] = c2;
    v["c2"] = c1;
    std::fs::write(dir.path().join("bad.jsonl"), format!("{v}\n")).unwrap();
    let out = knowref(dir.path(), &["validate", "--corpus", "bad.jsonl"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains(&id), "{stderr}");
    assert!(stderr.contains("c1 must precede c2"), "{stderr}");
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(knowref(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(knowref(dir.path(), &["stats"]).status.code(), Some(2));
    pipeline(dir.path(), &[]);
    let out = knowref(dir.path(), &["resolve", "--in", "labeled.jsonl", "--out", "p.tsv", "--resolver", "ngram"]);
    assert_eq!(out.status.code(), Some(2));
    let out = knowref(dir.path(), &["ingest", "--in", "raw.txt", "--out", "s.tsv", "--min-tokens", "40"]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(dir.path().join("cfg.toml"), "sed = 3\n").unwrap();
    let out = knowref(dir.path(), &["stats", "--corpus", "labeled.jsonl", "--config", "cfg.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_input_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = knowref(dir.path(), &["stats", "--corpus", "nope.jsonl"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_supplies_defaults() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    pipeline(a.path(), &["--seed", "5"]);
    std::fs::write(b.path().join("cfg.toml"), "seed = 5\njobs = 2\n").unwrap();
    pipeline(b.path(), &["--config", "cfg.toml"]);
    assert_eq!(read(a.path(), "labeled.jsonl"), read(b.path(), "labeled.jsonl"));
}

#[test]
fn resolve_then_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    pipeline(dir.path(), &[]);
    ok(dir.path(), &["resolve", "--in", "labeled.jsonl", "--out", "first.tsv", "--resolver", "first"]);
    let report: Value = serde_json::from_str(&ok(
        dir.path(),
        &["evaluate", "--corpus", "labeled.jsonl", "--predictions", "first.tsv"],
    ))
    .unwrap();
    let n = report["n"].as_u64().unwrap();
    assert_eq!(n, 9);
    let correct = report["correct"].as_u64().unwrap();
    let tsa = report["task_specific_accuracy"].as_f64().unwrap();
    assert!((tsa - correct as f64 / n as f64).abs() < 1e-12);

    ok(dir.path(), &["resolve", "--in", "labeled.jsonl", "--out", "rule.tsv", "--resolver", "gender-rule"]);
    ok(dir.path(), &["resolve", "--in", "labeled.jsonl", "--out", "rand.tsv", "--resolver", "random", "--seed", "4"]);

    std::fs::write(dir.path().join("partial.tsv"), read(dir.path(), "first.tsv").lines().next().unwrap()).unwrap();
    let out = knowref(dir.path(), &["evaluate", "--corpus", "labeled.jsonl", "--predictions", "partial.tsv", "--strict"]);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_str(&ok(
        dir.path(),
        &["evaluate", "--corpus", "labeled.jsonl", "--predictions", "partial.tsv"],
    ))
    .unwrap();
    assert_eq!(report["missing"].as_array().unwrap().len(), 8);
}

#[test]
fn pair_and_consistency() {
    let dir = tempfile::tempdir().unwrap();
    pipeline(dir.path(), &[]);
    ok(dir.path(), &["pair", "--in", "labeled.jsonl", "--out-original", "o.jsonl", "--out-switched", "s.jsonl"]);
    ok(dir.path(), &["resolve", "--in", "o.jsonl", "--out", "po.tsv", "--resolver", "first"]);
    ok(dir.path(), &["resolve", "--in", "s.jsonl", "--out", "ps.tsv", "--resolver", "first"]);
    let r: Value = serde_json::from_str(&ok(
        dir.path(),
        &[
            "consistency",
            "--original",
            "o.jsonl",
            "--switched",
            "s.jsonl",
            "--pred-original",
            "po.tsv",
            "--pred-switched",
            "ps.tsv",
        ],
    ))
    .unwrap();
    assert_eq!(r["consistency"], 1.0);
    assert_eq!(r["consistency"], r["consistency_by_position"]);
}

#[test]
fn external_predictions_file() {
    let dir = tempfile::tempdir().unwrap();
    pipeline(dir.path(), &[]);
    ok(dir.path(), &["resolve", "--in", "labeled.jsonl", "--out", "p.tsv", "--resolver", "second"]);
    ok(
        dir.path(),
        &["resolve", "--in", "labeled.jsonl", "--out", "ext.tsv", "--resolver", "external", "--predictions", "p.tsv"],
    );
    assert_eq!(read(dir.path(), "p.tsv"), read(dir.path(), "ext.tsv"));
}

#[test]
fn language_model_resolver() {
    let dir = tempfile::tempdir().unwrap();
    pipeline(dir.path(), &[]);
    ok(dir.path(), &["train-lm", "--in", "sents.tsv", "--out", "lm.bin", "--order", "3"]);
    ok(
        dir.path(),
        &["resolve", "--in", "labeled.jsonl", "--out", "lm.tsv", "--resolver", "ngram", "--model", "lm.bin"],
    );
    let preds = read(dir.path(), "lm.tsv");
    assert_eq!(preds.lines().count(), 9);
    for line in preds.lines() {
        let cols: Vec<&str> = line.split('\t').collect();
        assert_eq!(cols.len(), 3);
        assert!(cols[1] == "1" || cols[1] == "2");
    }
}

#[test]
fn tagger_training_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    pipeline(dir.path(), &[]);
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/tagged_train.txt");
    let data = data.to_str().unwrap();
    ok(dir.path(), &["train-tagger", "--in", data, "--out", "tagger.bin"]);
    ok(
        dir.path(),
        &["mine", "--in", "sents.tsv", "--out", "mined2.jsonl", "--tagger-model", "tagger.bin"],
    );
    assert_eq!(read(dir.path(), "mined.jsonl"), read(dir.path(), "mined2.jsonl"));
}

#[test]
fn kappa_and_qc() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.tsv"), "6 0 0 0\n0 6 0 0\n").unwrap();
    let r: Value = serde_json::from_str(&ok(dir.path(), &["kappa", "--matrix", "m.tsv"])).unwrap();
    assert_eq!(r["kappa"], 1.0);
    std::fs::write(dir.path().join("m.tsv"), "1 1 0 0\n1 1 0 0\n").unwrap();
    std::fs::write(dir.path().join("g.txt"), "1\n2\n").unwrap();
    let r: Value = serde_json::from_str(&ok(dir.path(), &["kappa", "--matrix", "m.tsv", "--gold", "g.txt"])).unwrap();
    assert!((r["kappa"].as_f64().unwrap() + 1.0).abs() < 1e-12);
    assert_eq!(r["majority"]["ties"], 2);
    std::fs::write(dir.path().join("m.tsv"), "6 0 0 0\n5 0 0 0\n").unwrap();
    assert_eq!(knowref(dir.path(), &["kappa", "--matrix", "m.tsv"]).status.code(), Some(1));

    pipeline(dir.path(), &[]);
    let corpus = read(dir.path(), "labeled.jsonl");
    let mut ann = String::new();
    for (i, line) in corpus.lines().enumerate() {
        let v: Value = serde_json::from_str(line).unwrap();
        let label = match i {
            0 => "neither",
            1 => if v["label"] == 1 { "2" } else { "1" },
            _ => if v["label"] == 1 { "1" } else { "2" },
        };
        ann.push_str(&format!("{}\t{label}\n", v["id"].as_str().unwrap()));
    }
    std::fs::write(dir.path().join("ann.tsv"), ann).unwrap();
    let r: Value = serde_json::from_str(&ok(
        dir.path(),
        &["qc", "--corpus", "labeled.jsonl", "--annotations", "ann.tsv"],
    ))
    .unwrap();
    assert_eq!(r["n"], 9);
    assert!((r["correct_rate"].as_f64().unwrap() - 7.0 / 9.0).abs() < 1e-12);
    assert!((r["unresolvable_rate"].as_f64().unwrap() - 1.0 / 9.0).abs() < 1e-12);
}

#[test]
fn stats_prints_rates() {
    let dir = tempfile::tempdir().unwrap();
    pipeline(dir.path(), &[]);
    let s: Value = serde_json::from_str(&ok(dir.path(), &["stats", "--corpus", "labeled.jsonl"])).unwrap();
    let m = s["masculine_pronoun_rate"].as_f64().unwrap();
    let f = s["feminine_pronoun_rate"].as_f64().unwrap();
    assert!((m + f - 1.0).abs() < 1e-12);
    assert_eq!(s["labeled"], 9);
}

fn http(addr: &str, method: &str, path: &str, body: Option<&str>) -> (u16, Value) {
    use std::io::{Read, Write};
    let mut stream = std::net::TcpStream::connect(addr).unwrap();
    let body = body.unwrap_or("");
    write!(
        stream,
        "{method} {path} HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\nContent-Type: application/json\r\nContent-Length: {}\r\n\r\n{body}",
        body.len()
    )
    .unwrap();
    let mut resp = String::new();
    stream.read_to_string(&mut resp).unwrap();
    let status: u16 = resp.split(' ').nth(1).unwrap().parse().unwrap();
    let payload = resp.split_once("\r\n\r\n").map(|(_, b)| b).unwrap_or("");
    (status, serde_json::from_str(payload).unwrap_or(Value::Null))
}

#[test]
fn serve_round_trip() {
    use std::io::{BufRead, BufReader};
    let dir = tempfile::tempdir().unwrap();
    pipeline(dir.path(), &[]);
    let mut child = Command::new(BIN)
        .args(["serve", "--corpus", "labeled.jsonl", "--store", "store.jsonl", "--port", "0"])
        .current_dir(dir.path())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stderr.take().unwrap()).read_line(&mut line).unwrap();
    let addr = line.trim().rsplit("http://").next().unwrap().to_string();

    let mut tokens = Vec::new();
    for _ in 0..6 {
        let (status, body) = http(&addr, "POST", "/api/register", None);
        assert_eq!(status, 200);
        tokens.push(body["annotator_id"].as_str().unwrap().to_string());
    }
    let (status, next) = http(&addr, "GET", &format!("/api/next?annotator={}", tokens[0]), None);
    assert_eq!(status, 200);
    let id = next["instance"]["id"].as_str().unwrap().to_string();
    for (k, t) in tokens.iter().enumerate() {
        let label = if k < 5 { "1" } else { "2" };
        let body = format!(r#"{{"candidate_id":"{id}","annotator_id":"{t}","label":"{label}"}}"#);
        let (status, _) = http(&addr, "POST", "/api/label", Some(&body));
        assert_eq!(status, 200);
    }
    let (_, export) = http(&addr, "GET", "/api/export", None);
    assert_eq!(export["instances"].as_array().unwrap().len(), 1);
    assert_eq!(export["instances"][0]["label"], 1);
    let (_, progress) = http(&addr, "GET", "/api/progress", None);
    assert_eq!(progress["effective_labels"], 6);
    let (_, agreement) = http(&addr, "GET", "/api/agreement", None);
    assert_eq!(agreement["accepted"], 1);
    child.kill().unwrap();
    child.wait().unwrap();
    assert_eq!(read(dir.path(), "store.jsonl").lines().count(), 12);
}
