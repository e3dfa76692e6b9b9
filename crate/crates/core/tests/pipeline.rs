mod common;

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use common::{fixture, synthetic_pair};
use lightalign::kg::{load_dataset, Dataset, SplitSpec};
use lightalign::pipeline::{
    evaluate, evaluate_files, metrics_json, pairs_tsv, run, run_basic, run_iterative, write_outputs, AlignConfig,
    CandidatePool, Metrics, Mode,
};
use lightalign::synth::{synthesize, SynthParams};
use ndarray::array;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn single_thread<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(f)
}

#[test]
fn isomorphic_copy_is_perfect() {
    let pair = synthetic_pair(1000, 4000, 0.0, 0.3, 0);
    let r = run_basic(&pair, &AlignConfig::default()).unwrap();
    assert_eq!(r.metrics.hits1, 1.0);
    assert!(r.metrics.hits1 <= r.metrics.mrr && r.metrics.mrr <= 1.0);
}

#[test]
fn no_rounds_no_signal() {
    let pair = synthetic_pair(300, 1200, 0.0, 0.3, 1);
    let cfg = AlignConfig { rounds: 0, dim: 128, ..Default::default() };
    let r = run_basic(&pair, &cfg).unwrap();
    assert!(r.metrics.hits1 < 0.02, "{:?}", r.metrics);
}

#[test]
fn iterative_beats_basic_with_few_seeds() {
    let pair = synthetic_pair(500, 700, 0.0, 0.05, 0);
    let cfg = AlignConfig::default();
    let basic = run_basic(&pair, &cfg).unwrap();
    let iter = run_iterative(&pair, &cfg).unwrap();
    assert!(iter.metrics.hits1 > basic.metrics.hits1, "{:?} vs {:?}", iter.metrics, basic.metrics);

    let seeds_src: HashSet<usize> = pair.seed_pairs.iter().map(|p| p.0).collect();
    let seeds_tgt: HashSet<usize> = pair.seed_pairs.iter().map(|p| p.1).collect();
    let mut src = HashSet::new();
    let mut tgt = HashSet::new();
    for &(s, t) in &iter.pseudo_seeds {
        assert!(!seeds_src.contains(&s) && !seeds_tgt.contains(&t));
        assert!(src.insert(s) && tgt.insert(t));
    }
    assert!(!iter.pseudo_seeds.is_empty());
}

#[test]
fn zero_epochs_equals_basic() {
    let pair = synthetic_pair(300, 600, 0.1, 0.2, 2);
    let cfg = AlignConfig { iterative_epochs: 0, dim: 256, ..Default::default() };
    let basic = run_basic(&pair, &cfg).unwrap();
    let iter = run_iterative(&pair, &cfg).unwrap();
    assert_eq!(basic.pairs, iter.pairs);
    assert_eq!(basic.metrics, iter.metrics);
    assert!(iter.pseudo_seeds.is_empty());
}

#[test]
fn seed_ratio_monotone_on_clean_copies() {
    let base = synthesize(&SynthParams { entities: 500, triples: 700, relations: 20, noise: 0.0, seed: 0 }).unwrap();
    let mut last = 0.0;
    for ratio in [0.1, 0.2, 0.3] {
        let r = run_basic(&base.resplit(ratio, 0).unwrap(), &AlignConfig::default()).unwrap();
        assert!(r.metrics.hits1 >= last, "ratio {ratio}: {} < {last}", r.metrics.hits1);
        last = r.metrics.hits1;
    }
}

#[test]
fn test_pool_restricts_decoding() {
    let pair = synthetic_pair(400, 1600, 0.1, 0.3, 3);
    let cfg = AlignConfig { candidates: CandidatePool::Test, dim: 256, ..Default::default() };
    let r = run_basic(&pair, &cfg).unwrap();
    let test_src: HashSet<usize> = pair.test_pairs.iter().map(|p| p.0).collect();
    let test_tgt: HashSet<usize> = pair.test_pairs.iter().map(|p| p.1).collect();
    assert_eq!(r.pairs.len(), test_src.len());
    assert!(r.pairs.iter().all(|p| test_src.contains(&p.src) && test_tgt.contains(&p.tgt)));
    assert!(r.metrics.hits1 > 0.8);
}

fn write_embeddings(dir: &Path, d: &Dataset, vectors: impl Fn(usize) -> Vec<f64>) {
    let fmt = |v: Vec<f64>| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(" ");
    let src: String = (0..d.pair.source.entity_count)
        .map(|i| format!("{}\t{}\n", d.source_entities.id_of(i), fmt(vectors(i))))
        .collect();
    let gold: std::collections::HashMap<usize, usize> = d.pair.test_pairs.iter().map(|&(s, t)| (t, s)).collect();
    let tgt: String = (0..d.pair.target.entity_count)
        .map(|j| format!("{}\t{}\n", d.target_entities.id_of(j), fmt(vectors(gold[&j]))))
        .collect();
    fs::write(dir.join("emb_src"), src).unwrap();
    fs::write(dir.join("emb_tgt"), tgt).unwrap();
}

fn literal_dataset() -> Dataset {
    let pair = synthesize(&SynthParams { entities: 200, triples: 600, relations: 5, noise: 0.3, seed: 4 }).unwrap();
    Dataset::from_pair(pair)
}

#[test]
fn literal_perfect_signal() {
    let d = literal_dataset();
    let tmp = tempfile::tempdir().unwrap();
    write_embeddings(tmp.path(), &d, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(i as u64);
        (0..32).map(|_| rng.random_range(-1.0..1.0)).collect()
    });
    let cfg = AlignConfig { mode: Mode::Literal, rounds: 0, iterative_epochs: 0, ..Default::default() };
    let r = run(&d, &cfg, Some((&tmp.path().join("emb_src"), &tmp.path().join("emb_tgt")))).unwrap();
    assert_eq!(r.metrics.hits1, 1.0);
}

#[test]
fn literal_identical_vectors_is_chance() {
    let d = literal_dataset();
    let tmp = tempfile::tempdir().unwrap();
    write_embeddings(tmp.path(), &d, |_| vec![1.0, 2.0, 3.0]);
    let cfg = AlignConfig { mode: Mode::Literal, rounds: 0, iterative_epochs: 0, ..Default::default() };
    let r = run(&d, &cfg, Some((&tmp.path().join("emb_src"), &tmp.path().join("emb_tgt")))).unwrap();
    assert!(r.metrics.hits1 < 0.05, "{:?}", r.metrics);
}

#[test]
fn literal_mode_needs_embeddings() {
    let d = literal_dataset();
    let cfg = AlignConfig { mode: Mode::Literal, ..Default::default() };
    assert!(run(&d, &cfg, None).unwrap_err().is_usage());
}

#[test]
fn single_threaded_runs_are_identical() {
    let dir = fixture("toy4");
    let d = load_dataset(&dir, &SplitSpec::TrainFile(dir.join("sup_ent_ids"))).unwrap();
    let cfg = AlignConfig { dim: 64, seed: 7, mode: Mode::Iterative, ..Default::default() };
    let strip = |mut v: serde_json::Value| {
        let o = v.as_object_mut().unwrap();
        o.remove("seconds_total");
        o.remove("seconds_per_stage");
        v
    };
    let a = single_thread(|| run(&d, &cfg, None).unwrap());
    let b = single_thread(|| run(&d, &cfg, None).unwrap());
    assert_eq!(pairs_tsv(&a, &d), pairs_tsv(&b, &d));
    assert_eq!(strip(metrics_json(&a)), strip(metrics_json(&b)));
}

#[test]
fn outputs_round_trip_through_eval() {
    let dir = fixture("six_node");
    let d = load_dataset(&dir, &SplitSpec::TrainFile(dir.join("sup_ent_ids"))).unwrap();
    let r = run(&d, &AlignConfig { dim: 64, ..Default::default() }, None).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    write_outputs(&r, &d, tmp.path()).unwrap();
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("metrics.json")).unwrap()).unwrap();
    for key in ["hits1", "hits10", "mrr", "seconds_total", "seconds_per_stage", "config", "dataset_fingerprint"] {
        assert!(json.get(key).is_some(), "{key}");
    }
    assert_eq!(json["dataset_fingerprint"].as_str().unwrap(), format!("{:016x}", d.fingerprint));
    for line in fs::read_to_string(tmp.path().join("pairs.tsv")).unwrap().lines() {
        let f: Vec<&str> = line.split('\t').collect();
        assert_eq!(f.len(), 3);
        assert_eq!(f[2].split('.').nth(1).unwrap().len(), 6);
    }
    let reference = tmp.path().join("reference");
    let tests: String = d
        .pair
        .test_pairs
        .iter()
        .map(|&(s, t)| format!("{}\t{}\n", d.source_entities.id_of(s), d.target_entities.id_of(t)))
        .collect();
    fs::write(&reference, tests).unwrap();
    let m = evaluate_files(&tmp.path().join("pairs.tsv"), &reference).unwrap();
    assert!((m.hits1 - r.metrics.hits1).abs() < 1e-12);
}

#[test]
fn hand_ranked_fixture() {
    let dir = fixture("eval");
    let m = evaluate_files(&dir.join("pairs.tsv"), &dir.join("reference")).unwrap();
    // Ranks 1, 2, 2 (tie broken by lower ID), absent, 11.
    assert!((m.hits1 - 0.2).abs() < 1e-12);
    assert!((m.hits10 - 0.6).abs() < 1e-12);
    assert!((m.mrr - 23.0 / 55.0).abs() < 1e-12);
}

#[test]
fn dense_ranking_metrics() {
    let s = array![[0.9, 0.1, 0.0], [0.5, 0.4, 0.1], [0.2, 0.2, 0.6]];
    let m = evaluate(&s, &[(0, 0), (1, 1), (2, 2)]).unwrap();
    assert_eq!(m, Metrics { hits1: 2.0 / 3.0, hits10: 1.0, mrr: (1.0 + 0.5 + 1.0) / 3.0 });
}
