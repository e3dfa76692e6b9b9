//! End-to-end alignment: label generation, three-view propagation, top-k
//! retrieval, sparse Sinkhorn and evaluation, in basic, iterative
//! (mutual-nearest self-training) and literal modes.

mod metrics;
mod output;

use std::collections::{BTreeMap, HashSet};
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::decode::{extract_alignment, sinkhorn_sparse, topk_retrieve, AlignedPair, ExtractMode, TransportPlan};
use crate::error::{Error, Result};
use crate::kg::{add_reverse_triples, Dataset, KgPair};
use crate::labels::{assign_random_labels, literal_matrix, InitialLabels, LabelMatrix};
use crate::propagate::{build_views, propagate, PropagateOptions, TripleViews};

pub use metrics::{evaluate, evaluate_files, rank_of, Metrics};
pub use output::{metrics_json, pairs_tsv, write_outputs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Basic,
    Iterative,
    Literal,
}

/// Which entities take part in decoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidatePool {
    /// Every entity not already in a seed pair.
    Unaligned,
    /// Only the entities that appear in test pairs (benchmark protocol).
    Test,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlignConfig {
    pub dim: usize,
    pub rounds: usize,
    pub topk: usize,
    pub tau: f64,
    pub sinkhorn_q: usize,
    pub mode: Mode,
    pub iterative_epochs: usize,
    pub seed: u64,
    pub reverse_triples: bool,
    pub per_round_l2: bool,
    pub candidates: CandidatePool,
}

impl Default for AlignConfig {
    fn default() -> Self {
        Self {
            dim: 1024,
            rounds: 2,
            topk: 500,
            tau: 0.05,
            sinkhorn_q: 10,
            mode: Mode::Basic,
            iterative_epochs: 5,
            seed: 0,
            reverse_triples: true,
            per_round_l2: true,
            candidates: CandidatePool::Unaligned,
        }
    }
}

impl AlignConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [("dim", self.dim), ("topk", self.topk), ("sinkhorn_q", self.sinkhorn_q)];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be at least 1")));
            }
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidConfig(format!("tau must be > 0, got {}", self.tau)));
        }
        Ok(())
    }

    fn propagate_options(&self) -> PropagateOptions {
        PropagateOptions {
            rounds: self.rounds,
            per_round_l2: self.per_round_l2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config: AlignConfig,
    /// Hex form of the dataset's 64-bit content hash.
    pub dataset_fingerprint: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentResult {
    /// Row-argmax of the final plan, one per decoded source entity.
    pub pairs: Vec<AlignedPair>,
    pub metrics: Metrics,
    /// Wall-clock seconds per stage, summed over epochs.
    pub timing: BTreeMap<String, f64>,
    pub provenance: Provenance,
    /// Pseudo-seed pairs added by self-training, in insertion order.
    pub pseudo_seeds: Vec<(usize, usize)>,
}

impl AlignmentResult {
    pub fn seconds_total(&self) -> f64 {
        self.timing.values().sum()
    }
}

#[derive(Default)]
struct Clock {
    stages: BTreeMap<String, f64>,
}

impl Clock {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        *self.stages.entry(stage.to_string()).or_default() += start.elapsed().as_secs_f64();
        out
    }
}

/// Graph-side state shared by every epoch.
struct Prepared<'a> {
    pair: &'a KgPair,
    views_src: TripleViews,
    views_tgt: TripleViews,
    relations_src: usize,
    relations_tgt: usize,
    src_pool: Vec<usize>,
    tgt_pool: Vec<usize>,
}

impl<'a> Prepared<'a> {
    fn new(pair: &'a KgPair, cfg: &AlignConfig, clock: &mut Clock) -> Self {
        clock.time("views", || {
            let (src, tgt) = if cfg.reverse_triples {
                (add_reverse_triples(&pair.source), add_reverse_triples(&pair.target))
            } else {
                (pair.source.clone(), pair.target.clone())
            };
            let (src_pool, tgt_pool) = candidate_pools(pair, cfg.candidates);
            Self {
                pair,
                views_src: build_views(&src),
                views_tgt: build_views(&tgt),
                relations_src: src.relation_count,
                relations_tgt: tgt.relation_count,
                src_pool,
                tgt_pool,
            }
        })
    }

    fn labels(&self, source: LabelMatrix, target: LabelMatrix) -> InitialLabels {
        let d = source.dim();
        InitialLabels {
            source,
            target,
            source_relations: LabelMatrix::zeros(self.relations_src, d),
            target_relations: LabelMatrix::zeros(self.relations_tgt, d),
        }
    }
}

fn candidate_pools(pair: &KgPair, pool: CandidatePool) -> (Vec<usize>, Vec<usize>) {
    match pool {
        CandidatePool::Unaligned => {
            let seed_src: HashSet<_> = pair.seed_pairs.iter().map(|p| p.0).collect();
            let seed_tgt: HashSet<_> = pair.seed_pairs.iter().map(|p| p.1).collect();
            (
                (0..pair.source.entity_count).filter(|e| !seed_src.contains(e)).collect(),
                (0..pair.target.entity_count).filter(|e| !seed_tgt.contains(e)).collect(),
            )
        }
        CandidatePool::Test => {
            let mut src: Vec<usize> = pair.test_pairs.iter().map(|p| p.0).collect();
            let mut tgt: Vec<usize> = pair.test_pairs.iter().map(|p| p.1).collect();
            src.sort_unstable();
            src.dedup();
            tgt.sort_unstable();
            tgt.dedup();
            (src, tgt)
        }
    }
}

fn select_rows(m: &LabelMatrix, rows: &[usize]) -> LabelMatrix {
    let d = m.dim();
    let mut out = LabelMatrix::zeros(rows.len(), d);
    for (dst, &r) in rows.iter().enumerate() {
        out.row_mut(dst).copy_from_slice(m.row(r));
    }
    out
}

/// One decoding pass: propagate, retrieve over the pools, Sinkhorn.
/// The plan's rows and columns index `src_pool` / `tgt_pool`.
fn decode_once(prep: &Prepared<'_>, labels: &InitialLabels, cfg: &AlignConfig, clock: &mut Clock) -> Result<TransportPlan> {
    let (state_src, state_tgt) = clock.time("propagate", || propagate(&prep.views_src, &prep.views_tgt, labels, &cfg.propagate_options()))?;
    let sim = clock.time("retrieve", || {
        let src = select_rows(&state_src.concatenated(), &prep.src_pool);
        let tgt = select_rows(&state_tgt.concatenated(), &prep.tgt_pool);
        topk_retrieve(&src, &tgt, cfg.topk)
    })?;
    clock.time("sinkhorn", || sinkhorn_sparse(&sim, cfg.tau, cfg.sinkhorn_q))
}

fn score(prep: &Prepared<'_>, plan: &TransportPlan, clock: &mut Clock) -> Result<(Vec<AlignedPair>, Metrics)> {
    clock.time("evaluate", || {
        let src_row: std::collections::HashMap<usize, usize> =
            prep.src_pool.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let tgt_col: std::collections::HashMap<usize, usize> =
            prep.tgt_pool.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let ranks: Vec<Option<usize>> = prep
            .pair
            .test_pairs
            .iter()
            .map(|(s, t)| match (src_row.get(s), tgt_col.get(t)) {
                (Some(&r), Some(&c)) => rank_of(plan, r, c),
                _ => None,
            })
            .collect();
        let metrics = Metrics::from_ranks(&ranks)?;
        let pairs = extract_alignment(plan, ExtractMode::RowArgmax)
            .into_iter()
            .map(|p| AlignedPair {
                src: prep.src_pool[p.src],
                tgt: prep.tgt_pool[p.tgt],
                score: p.score,
            })
            .collect();
        Ok((pairs, metrics))
    })
}

/// Mutual-argmax pairs of `plan` whose entities are not yet aligned, best
/// score first; a later pair touching an entity already taken is dropped.
fn new_pseudo_seeds(prep: &Prepared<'_>, plan: &TransportPlan, taken_src: &mut HashSet<usize>, taken_tgt: &mut HashSet<usize>) -> Vec<(usize, usize)> {
    let mut mutual: Vec<AlignedPair> = extract_alignment(plan, ExtractMode::MutualArgmax);
    mutual.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.src.cmp(&b.src)));
    let mut out = Vec::new();
    for p in mutual {
        let (s, t) = (prep.src_pool[p.src], prep.tgt_pool[p.tgt]);
        if taken_src.contains(&s) || taken_tgt.contains(&t) {
            continue;
        }
        taken_src.insert(s);
        taken_tgt.insert(t);
        out.push((s, t));
    }
    out
}

/// Base labels for one epoch: `base` (literal or empty) plus random shared
/// vectors for `classes`, whose class index is their position in the list.
fn epoch_labels(prep: &Prepared<'_>, base: Option<&(LabelMatrix, LabelMatrix)>, classes: &[(usize, usize)], cfg: &AlignConfig) -> Result<InitialLabels> {
    let pair = prep.pair;
    let random = |n: usize| -> (LabelMatrix, LabelMatrix) {
        let mut src = LabelMatrix::zeros(pair.source.entity_count, cfg.dim);
        let mut tgt = LabelMatrix::zeros(pair.target.entity_count, cfg.dim);
        assign_random_labels(&mut src, &mut tgt, &classes[..n], 0, cfg.seed);
        (src, tgt)
    };
    let (src, tgt) = match base {
        None => random(classes.len()),
        Some((ls, lt)) if classes.is_empty() => (ls.clone(), lt.clone()),
        Some((ls, lt)) => {
            let (rs, rt) = random(classes.len());
            (LabelMatrix::hstack(&[ls, &rs])?, LabelMatrix::hstack(&[lt, &rt])?)
        }
    };
    Ok(prep.labels(src, tgt))
}

/// Shared driver. `literal` replaces seed labels with name embeddings;
/// `epochs` rounds of self-training follow the first decoding.
fn run_inner(pair: &KgPair, cfg: &AlignConfig, literal: Option<(LabelMatrix, LabelMatrix)>, epochs: usize, mut clock: Clock) -> Result<AlignmentResult> {
    cfg.validate()?;
    pair.validate()?;
    if literal.is_none() && pair.seed_pairs.is_empty() {
        return Err(Error::EmptySeeds);
    }
    let prep = Prepared::new(pair, cfg, &mut clock);

    // Class list: original seeds (structural modes only), then pseudo-seeds.
    let mut classes: Vec<(usize, usize)> = match literal {
        None => pair.seed_pairs.clone(),
        Some(_) => Vec::new(),
    };
    let mut taken_src: HashSet<usize> = pair.seed_pairs.iter().map(|p| p.0).collect();
    let mut taken_tgt: HashSet<usize> = pair.seed_pairs.iter().map(|p| p.1).collect();
    let mut pseudo_seeds = Vec::new();

    let labels = clock.time("labels", || epoch_labels(&prep, literal.as_ref(), &classes, cfg))?;
    let mut plan = decode_once(&prep, &labels, cfg, &mut clock)?;
    drop(labels);
    for _ in 0..epochs {
        let fresh = clock.time("pseudo_seeds", || new_pseudo_seeds(&prep, &plan, &mut taken_src, &mut taken_tgt));
        if fresh.is_empty() {
            break;
        }
        classes.extend_from_slice(&fresh);
        pseudo_seeds.extend(fresh);
        let labels = clock.time("labels", || epoch_labels(&prep, literal.as_ref(), &classes, cfg))?;
        plan = decode_once(&prep, &labels, cfg, &mut clock)?;
    }
    let (pairs, metrics) = score(&prep, &plan, &mut clock)?;
    Ok(AlignmentResult {
        pairs,
        metrics,
        timing: clock.stages,
        provenance: Provenance {
            config: cfg.clone(),
            dataset_fingerprint: String::new(),
        },
        pseudo_seeds,
    })
}

/// Random-orthogonal labels, one propagation, one decoding.
pub fn run_basic(pair: &KgPair, cfg: &AlignConfig) -> Result<AlignmentResult> {
    run_inner(pair, cfg, None, 0, Clock::default())
}

/// Basic run followed by up to `iterative_epochs` rounds of mutual-nearest
/// pseudo-seeding; metrics come from the last decoding.
pub fn run_iterative(pair: &KgPair, cfg: &AlignConfig) -> Result<AlignmentResult> {
    run_inner(pair, cfg, None, cfg.iterative_epochs, Clock::default())
}

/// Name-embedding labels instead of seed labels, followed by
/// `iterative_epochs` rounds of pseudo-seeding (0 disables them).
pub fn run_literal(dataset: &Dataset, cfg: &AlignConfig, emb_src: &Path, emb_tgt: &Path) -> Result<AlignmentResult> {
    let mut clock = Clock::default();
    let literal = clock.time("labels", || -> Result<_> {
        let src = literal_matrix(emb_src, &dataset.source_entities)?;
        let tgt = literal_matrix(emb_tgt, &dataset.target_entities)?;
        if src.dim() != tgt.dim() {
            return Err(Error::DimensionMismatch(format!(
                "source embeddings have dimension {}, target {}",
                src.dim(),
                tgt.dim()
            )));
        }
        Ok((src, tgt))
    })?;
    let mut result = run_inner(&dataset.pair, cfg, Some(literal), cfg.iterative_epochs, clock)?;
    result.provenance.dataset_fingerprint = format!("{:016x}", dataset.fingerprint);
    Ok(result)
}

/// Dispatches on `cfg.mode` and records the dataset fingerprint.
pub fn run(dataset: &Dataset, cfg: &AlignConfig, embeddings: Option<(&Path, &Path)>) -> Result<AlignmentResult> {
    let mut result = match cfg.mode {
        Mode::Basic => run_basic(&dataset.pair, cfg)?,
        Mode::Iterative => run_iterative(&dataset.pair, cfg)?,
        Mode::Literal => {
            let (src, tgt) = embeddings.ok_or_else(|| {
                Error::InvalidConfig("literal mode needs source and target embedding files".into())
            })?;
            run_literal(dataset, cfg, src, tgt)?
        }
    };
    result.provenance.dataset_fingerprint = format!("{:016x}", dataset.fingerprint);
    Ok(result)
}
