#![allow(dead_code)]

use std::path::PathBuf;

use lightalign::kg::{KgPair, KnowledgeGraph, Triple};
use lightalign::synth::{synthesize, SynthParams};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Isomorphic-copy pair re-split into seeds and tests.
pub fn synthetic_pair(entities: usize, triples: usize, noise: f64, ratio: f64, seed: u64) -> KgPair {
    let params = SynthParams {
        entities,
        triples,
        relations: 20.min(triples.max(1)),
        noise,
        seed,
    };
    synthesize(&params).unwrap().resplit(ratio, seed).unwrap()
}

/// Source 0 links to anchors a0..a4 with relation 0; the wrong target 0
/// links to the same anchors with relation 0, the gold target 1 to anchors
/// a0, a1, a2, a5, a6 with relation 1. A source bridge entity points into
/// a4, a5 and a6 so the source anchors are connected three hops out without
/// feeding labels into the source entity within two rounds.
pub fn decoy_pair() -> KgPair {
    let anchors = |prefix: &[&str]| -> Vec<String> {
        prefix.iter().map(|s| s.to_string()).chain((0..7).map(|i| format!("a{i}"))).collect()
    };
    let mut src: Vec<Triple> = (0..5).map(|i| Triple::new(0, 0, i + 1)).collect();
    src.extend([4, 5, 6].iter().map(|&i| Triple::new(8, 1, i + 1)));
    let mut tgt: Vec<Triple> = (0..5).map(|i| Triple::new(0, 0, i + 2)).collect();
    tgt.extend([0, 1, 2, 5, 6].iter().map(|&i| Triple::new(1, 1, i + 2)));
    let mut src_names = anchors(&["s"]);
    src_names.push("bridge".into());
    let source = KnowledgeGraph::new(9, 2, src).unwrap().with_entity_names(src_names).unwrap();
    let target = KnowledgeGraph::new(9, 2, tgt).unwrap().with_entity_names(anchors(&["wrong", "gold"])).unwrap();
    let seeds = (0..7).map(|i| (i + 1, i + 2)).collect();
    KgPair::new(source, target, seeds, vec![(0, 1)]).unwrap()
}
