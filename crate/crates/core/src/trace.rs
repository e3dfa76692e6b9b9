//! Interpretability tracer.
//!
//! Re-runs propagation with exact one-hot labels on a small subgraph around
//! a source entity and two candidate targets, so that dimension x of every
//! label vector is the relevance to seed pair x. For each focal entity and
//! round the tracer lists the strongest anchors and counts how many anchors
//! the source shares with each candidate.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kg::{add_reverse_triples, KgPair, KnowledgeGraph, Triple};
use crate::propagate::{propagate_onehot_subgraph, PropagateOptions};

/// Focal entities per side (local indices of the full pair).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Focus {
    pub source: Vec<usize>,
    pub target: Vec<usize>,
}

/// A restricted pair plus local → original index maps.
#[derive(Debug, Clone, PartialEq)]
pub struct Subgraph {
    pub pair: KgPair,
    pub source_map: Vec<usize>,
    pub target_map: Vec<usize>,
}

impl Subgraph {
    pub fn source_local(&self, original: usize) -> Option<usize> {
        self.source_map.binary_search(&original).ok()
    }

    pub fn target_local(&self, original: usize) -> Option<usize> {
        self.target_map.binary_search(&original).ok()
    }
}

/// Entities within `hops` undirected hops of `focus`, ascending.
fn neighbourhood(kg: &KnowledgeGraph, focus: &[usize], hops: usize) -> Result<Vec<usize>> {
    let mut adj = vec![Vec::new(); kg.entity_count];
    for t in &kg.triples {
        adj[t.head].push(t.tail);
        adj[t.tail].push(t.head);
    }
    let mut dist = vec![usize::MAX; kg.entity_count];
    let mut queue = VecDeque::new();
    for &f in focus {
        if f >= kg.entity_count {
            return Err(Error::EntityOutOfRange {
                index: f,
                count: kg.entity_count,
            });
        }
        if dist[f] != 0 {
            dist[f] = 0;
            queue.push_back(f);
        }
    }
    while let Some(v) = queue.pop_front() {
        if dist[v] == hops {
            continue;
        }
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    Ok((0..kg.entity_count).filter(|&v| dist[v] != usize::MAX).collect())
}

fn restrict(kg: &KnowledgeGraph, nodes: &[usize], keep_triples: bool) -> KnowledgeGraph {
    let local = |g: usize| nodes.binary_search(&g).ok();
    let triples = if keep_triples {
        kg.triples
            .iter()
            .filter_map(|t| Some(Triple::new(local(t.head)?, t.rel, local(t.tail)?)))
            .collect()
    } else {
        Vec::new()
    };
    KnowledgeGraph {
        entity_count: nodes.len(),
        relation_count: kg.relation_count,
        triples,
        entity_names: kg
            .entity_names
            .as_ref()
            .map(|names| nodes.iter().map(|&g| names[g].clone()).collect()),
        relation_names: kg.relation_names.clone(),
    }
}

/// Induced subgraph of everything within `hops` of a focal entity, per
/// graph. With `hops = 0` only the focal entities remain, without triples.
/// Seed and test pairs survive when both members are inside.
pub fn extract_subgraph(pair: &KgPair, focus: &Focus, hops: usize) -> Result<Subgraph> {
    if focus.source.is_empty() && focus.target.is_empty() {
        return Err(Error::Trace("focus set is empty".into()));
    }
    let source_map = neighbourhood(&pair.source, &focus.source, hops)?;
    let target_map = neighbourhood(&pair.target, &focus.target, hops)?;
    let remap = |pairs: &[(usize, usize)]| -> Vec<(usize, usize)> {
        pairs
            .iter()
            .filter_map(|&(s, t)| {
                Some((
                    source_map.binary_search(&s).ok()?,
                    target_map.binary_search(&t).ok()?,
                ))
            })
            .collect()
    };
    let sub = KgPair::new(
        restrict(&pair.source, &source_map, hops > 0),
        restrict(&pair.target, &target_map, hops > 0),
        remap(&pair.seed_pairs),
        remap(&pair.test_pairs),
    )?;
    Ok(Subgraph {
        pair: sub,
        source_map,
        target_map,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceOptions {
    pub hops: usize,
    pub rounds: usize,
    /// Anchors listed per entity and round.
    pub top_m: usize,
    pub reverse_triples: bool,
    pub per_round_l2: bool,
}

impl TraceOptions {
    /// Defaults: `hops = rounds`, five anchors, same graph handling as the pipeline.
    pub fn new(rounds: usize) -> Self {
        Self {
            hops: rounds,
            rounds,
            top_m: 5,
            reverse_triples: true,
            per_round_l2: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnchorScore {
    /// Position of the anchor in the original seed list.
    pub seed_index: usize,
    pub name: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FocalTrace {
    pub role: &'static str,
    pub entity: usize,
    pub name: String,
    /// `rounds[t]`: the top anchors after t rounds (t = 0 is the input).
    pub rounds: Vec<Vec<AnchorScore>>,
}

impl FocalTrace {
    fn anchors(&self, round: usize) -> BTreeSet<usize> {
        self.rounds[round].iter().map(|a| a.seed_index).collect()
    }

    fn all_anchors(&self) -> BTreeSet<usize> {
        self.rounds.iter().flatten().map(|a| a.seed_index).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoundOverlap {
    pub round: usize,
    /// Anchors shared by the source and the predicted target.
    pub predicted: usize,
    /// Anchors shared by the source and the gold target.
    pub gold: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapSummary {
    pub per_round: Vec<RoundOverlap>,
    /// Shared anchors over the union of all listed rounds.
    pub union_predicted: usize,
    pub union_gold: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceReport {
    pub source: FocalTrace,
    pub predicted: FocalTrace,
    pub gold: FocalTrace,
    pub overlap: OverlapSummary,
    pub subgraph_entities: (usize, usize),
    pub anchors_in_subgraph: usize,
}

fn display_name(kg: &KnowledgeGraph, index: usize, fallback: &str) -> String {
    kg.entity_name(index)
        .map(str::to_string)
        .unwrap_or_else(|| format!("{fallback}{index}"))
}

fn anchor_name(pair: &KgPair, seed: (usize, usize)) -> String {
    let s = display_name(&pair.source, seed.0, "src#");
    let t = display_name(&pair.target, seed.1, "tgt#");
    if s == t {
        s
    } else {
        format!("{s} / {t}")
    }
}

/// Explains why `src` was matched to `predicted` rather than `gold`.
pub fn trace_alignment(pair: &KgPair, src: usize, predicted: usize, gold: usize, opts: &TraceOptions) -> Result<TraceReport> {
    if opts.top_m == 0 {
        return Err(Error::InvalidConfig("m must be at least 1".into()));
    }
    let focus = Focus {
        source: vec![src],
        target: vec![predicted, gold],
    };
    let sub = extract_subgraph(pair, &focus, opts.hops)?;
    if sub.pair.seed_pairs.is_empty() {
        return Err(Error::Trace(format!(
            "no seed pair lies within {} hops of the focal entities; try a larger --hops",
            opts.hops
        )));
    }
    // Seed positions in the original list, for stable anchor ids.
    let seed_ids: Vec<usize> = sub
        .pair
        .seed_pairs
        .iter()
        .map(|&(s, t)| {
            let orig = (sub.source_map[s], sub.target_map[t]);
            pair.seed_pairs.iter().position(|&p| p == orig).unwrap()
        })
        .collect();

    let prep = |kg: &KnowledgeGraph| {
        if opts.reverse_triples {
            add_reverse_triples(kg)
        } else {
            kg.clone()
        }
    };
    let popts = PropagateOptions {
        rounds: opts.rounds,
        per_round_l2: opts.per_round_l2,
    };
    let src_seeds: Vec<usize> = sub.pair.seed_pairs.iter().map(|p| p.0).collect();
    let tgt_seeds: Vec<usize> = sub.pair.seed_pairs.iter().map(|p| p.1).collect();
    let src_state = propagate_onehot_subgraph(&prep(&sub.pair.source), &src_seeds, &popts)?;
    let tgt_state = propagate_onehot_subgraph(&prep(&sub.pair.target), &tgt_seeds, &popts)?;

    let focal = |role: &'static str, state: &crate::propagate::LabelState, local: usize, original: usize, kg: &KnowledgeGraph, prefix: &str| {
        let rounds = state
            .per_round_entity
            .iter()
            .map(|m| {
                let mut dims: Vec<(usize, f32)> = m
                    .row(local)
                    .iter()
                    .copied()
                    .enumerate()
                    .filter(|&(_, v)| v > 0.0)
                    .collect();
                dims.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
                dims.truncate(opts.top_m);
                dims.into_iter()
                    .map(|(x, v)| AnchorScore {
                        seed_index: seed_ids[x],
                        name: anchor_name(pair, pair.seed_pairs[seed_ids[x]]),
                        score: v as f64,
                    })
                    .collect()
            })
            .collect();
        FocalTrace {
            role,
            entity: original,
            name: display_name(kg, original, prefix),
            rounds,
        }
    };
    let source = focal("source", &src_state, sub.source_local(src).unwrap(), src, &pair.source, "src#");
    let predicted_trace = focal("predicted", &tgt_state, sub.target_local(predicted).unwrap(), predicted, &pair.target, "tgt#");
    let gold_trace = focal("gold", &tgt_state, sub.target_local(gold).unwrap(), gold, &pair.target, "tgt#");

    let per_round = (0..=opts.rounds)
        .map(|t| {
            let s = source.anchors(t);
            RoundOverlap {
                round: t,
                predicted: s.intersection(&predicted_trace.anchors(t)).count(),
                gold: s.intersection(&gold_trace.anchors(t)).count(),
            }
        })
        .collect();
    let all = source.all_anchors();
    let overlap = OverlapSummary {
        per_round,
        union_predicted: all.intersection(&predicted_trace.all_anchors()).count(),
        union_gold: all.intersection(&gold_trace.all_anchors()).count(),
    };
    Ok(TraceReport {
        source,
        predicted: predicted_trace,
        gold: gold_trace,
        overlap,
        subgraph_entities: (sub.pair.source.entity_count, sub.pair.target.entity_count),
        anchors_in_subgraph: sub.pair.seed_pairs.len(),
    })
}

impl TraceReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "subgraph: {} source / {} target entities, {} anchor pairs",
            self.subgraph_entities.0, self.subgraph_entities.1, self.anchors_in_subgraph
        );
        for f in [&self.source, &self.predicted, &self.gold] {
            let _ = writeln!(out, "\n[{}] {}", f.role, f.name);
            for (t, anchors) in f.rounds.iter().enumerate() {
                let list: Vec<String> = anchors.iter().map(|a| format!("{} ({:.4})", a.name, a.score)).collect();
                let _ = writeln!(out, "  round {t}: {}", if list.is_empty() { "-".to_string() } else { list.join(", ") });
            }
        }
        let _ = writeln!(out, "\nshared anchors with source (predicted / gold):");
        for r in &self.overlap.per_round {
            let _ = writeln!(out, "  round {}: {} / {}", r.round, r.predicted, r.gold);
        }
        let _ = writeln!(
            out,
            "  all rounds: {} / {}",
            self.overlap.union_predicted, self.overlap.union_gold
        );
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star() -> KgPair {
        let t = (1..5).map(|i| Triple::new(0, 0, i)).collect();
        let kg = KnowledgeGraph::new(6, 1, t).unwrap();
        KgPair::new(kg.clone(), kg, vec![(1, 1)], vec![]).unwrap()
    }

    #[test]
    fn zero_hops_is_focus_only() {
        let sub = extract_subgraph(&star(), &Focus { source: vec![0], target: vec![] }, 0).unwrap();
        assert_eq!(sub.source_map, vec![0]);
        assert!(sub.pair.source.triples.is_empty());
        assert!(sub.target_map.is_empty());
    }

    #[test]
    fn star_one_hop_is_whole_star() {
        let sub = extract_subgraph(&star(), &Focus { source: vec![0], target: vec![3] }, 1).unwrap();
        assert_eq!(sub.source_map, vec![0, 1, 2, 3, 4]);
        assert_eq!(sub.pair.source.triples.len(), 4);
        assert_eq!(sub.target_map, vec![0, 3]);
        assert!(sub.pair.seed_pairs.is_empty());
    }

    #[test]
    fn out_of_range_focus() {
        assert!(extract_subgraph(&star(), &Focus { source: vec![9], target: vec![] }, 1).is_err());
    }

    #[test]
    fn seed_member_round_zero_is_itself() {
        let r = trace_alignment(&star(), 1, 1, 2, &TraceOptions::new(1)).unwrap();
        assert_eq!(r.source.rounds[0].len(), 1);
        assert_eq!(r.source.rounds[0][0].seed_index, 0);
        assert_eq!(r.source.rounds[0][0].score, 1.0);
        assert!(r.gold.rounds[0].is_empty());
    }

    #[test]
    fn no_anchor_nearby_suggests_more_hops() {
        let err = trace_alignment(&star(), 5, 5, 5, &TraceOptions::new(1)).unwrap_err();
        assert!(err.to_string().contains("--hops"));
    }
}
