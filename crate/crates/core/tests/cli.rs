mod common;

use std::fs;
use std::process::{Command, Output};

use common::fixture;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lightalign")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn metric(line: &str, key: &str) -> f64 {
    let f: Vec<&str> = line.split_whitespace().collect();
    let i = f.iter().position(|w| *w == key).unwrap();
    f[i + 1].parse().unwrap()
}

#[test]
fn align_writes_outputs() {
    let out = tempfile::tempdir().unwrap();
    let dir = fixture("toy4");
    let o = cli(&["align", "--dir", dir.to_str().unwrap(), "--mode", "basic", "--dim", "64", "--seed", "7", "--out", out.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let line = stdout(&o);
    assert!(line.starts_with("hits@1 ") && line.contains(" hits@10 ") && line.contains(" mrr ") && line.contains(" seconds "));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.path().join("metrics.json")).unwrap()).unwrap();
    assert_eq!(json["config"]["dim"], 64);
    assert_eq!(json["config"]["seed"], 7);
    assert!(out.path().join("pairs.tsv").is_file());
}

#[test]
fn invalid_tau_is_usage_error() {
    let dir = fixture("toy4");
    let o = cli(&["align", "--dir", dir.to_str().unwrap(), "--tau", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tau"));
}

#[test]
fn unknown_flag_and_missing_data() {
    assert_eq!(cli(&["align", "--bogus"]).status.code(), Some(1));
    let o = cli(&["align", "--dir", fixture("does_not_exist").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_lists_defaults() {
    let help = stdout(&cli(&["align", "--help"]));
    for needle in ["1024", "[default: 2]", "500", "0.05", "[default: 10]", "--sinkhorn-q", "--no-reverse", "--config"] {
        assert!(help.contains(needle), "{needle}");
    }
}

#[test]
fn synth_then_align_is_perfect() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    let d = data.to_str().unwrap();
    let o = cli(&["synth", "--entities", "200", "--triples", "800", "--noise", "0.0", "--seed", "1", "--out", d]);
    assert_eq!(o.status.code(), Some(0));
    let o = cli(&["align", "--dir", d]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(metric(&stdout(&o), "hits@1"), 1.0);
}

#[test]
fn synth_is_byte_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for p in [&a, &b] {
        let o = cli(&["synth", "--entities", "50", "--triples", "150", "--noise", "0.2", "--seed", "3", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    for name in ["ent_ids_1", "ent_ids_2", "triples_1", "triples_2", "ref_ent_ids"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn config_file_with_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(&cfg, r#"{"dim": 32, "rounds": 1, "seed": 5}"#).unwrap();
    let out = tmp.path().join("out");
    let dir = fixture("six_node");
    let o = cli(&["--threads", "1", "align", "--dir", dir.to_str().unwrap(), "--config", cfg.to_str().unwrap(), "--seed", "9", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("metrics.json")).unwrap()).unwrap();
    assert_eq!(json["config"]["dim"], 32);
    assert_eq!(json["config"]["rounds"], 1);
    assert_eq!(json["config"]["seed"], 9);

    fs::write(&cfg, r#"{"dimension": 32}"#).unwrap();
    let o = cli(&["align", "--dir", dir.to_str().unwrap(), "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn threads_from_environment() {
    let dir = fixture("toy4");
    let o = Command::new(env!("CARGO_BIN_EXE_lightalign"))
        .args(["align", "--dir", dir.to_str().unwrap(), "--dim", "16"])
        .env("LIGHTALIGN_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn eval_fixture() {
    let dir = fixture("eval");
    let o = cli(&["eval", "--pairs", dir.join("pairs.tsv").to_str().unwrap(), "--reference", dir.join("reference").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o);
    assert_eq!(metric(&line, "hits@1"), 0.2);
    assert_eq!(metric(&line, "hits@10"), 0.6);
}

#[test]
fn trace_text_and_json() {
    let dir = fixture("six_node");
    let d = dir.to_str().unwrap();
    let o = cli(&["trace", "--dir", d, "--src", "0", "--predicted", "101", "--gold", "100"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("[source] e0") && text.contains("round 2: e3"));
    let o = cli(&["trace", "--dir", d, "--src", "0", "--predicted", "101", "--gold", "100", "--json", "--m", "1"]);
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["source"]["rounds"][2].as_array().unwrap().len(), 1);
    let o = cli(&["trace", "--dir", d, "--src", "0", "--predicted", "101", "--gold", "999"]);
    assert_eq!(o.status.code(), Some(2));
}
