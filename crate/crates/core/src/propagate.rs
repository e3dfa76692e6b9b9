//! Three-view label propagation.
//!
//! A KG's adjacency tensor (head × tail × relation) is summed along each axis
//! to give three sparse matrices: `side` (head → tail), `front`
//! (head → relation) and `top` (relation → tail). One round moves entity
//! labels with `side`, relation labels into entities with `front`, and entity
//! labels into relations with `top`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kg::KnowledgeGraph;
use crate::labels::LabelMatrix;

/// Compressed sparse row matrix with nonnegative weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseView {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    weights: Vec<f64>,
}

impl SparseView {
    /// Builds a view from `(row, col, weight)` entries; repeated keys add up.
    pub fn from_entries(rows: usize, cols: usize, mut entries: Vec<(usize, usize, f64)>) -> Self {
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; rows + 1];
        let mut indices = Vec::with_capacity(entries.len());
        let mut weights: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, w) in entries {
            assert!(r < rows && c < cols, "entry ({r}, {c}) outside {rows}x{cols}");
            if last == Some((r, c)) {
                *weights.last_mut().unwrap() += w;
            } else {
                indices.push(c);
                weights.push(w);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..rows {
            indptr[r + 1] += indptr[r];
        }
        Self {
            rows,
            cols,
            indptr,
            indices,
            weights,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    /// Column indices and weights of row `r`, ascending by column.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let span = self.indptr[r]..self.indptr[r + 1];
        (&self.indices[span.clone()], &self.weights[span])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, w) = self.row(r);
        cols.binary_search(&c).map_or(0.0, |i| w[i])
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// L1 row normalization; empty rows stay empty.
    pub fn row_normalized(&self) -> Self {
        let mut out = self.clone();
        for r in 0..self.rows {
            let span = self.indptr[r]..self.indptr[r + 1];
            let sum: f64 = out.weights[span.clone()].iter().sum();
            if sum > 0.0 {
                out.weights[span].iter_mut().for_each(|w| *w /= sum);
            }
        }
        out
    }

    /// `self · x` with f64 accumulation, added into `acc` (one row per output
    /// row, `x.dim()` wide).
    fn accumulate_row(&self, r: usize, x: &LabelMatrix, acc: &mut [f64]) {
        let (cols, w) = self.row(r);
        for (&c, &wt) in cols.iter().zip(w) {
            for (a, &v) in acc.iter_mut().zip(x.row(c)) {
                *a += wt * v as f64;
            }
        }
    }
}

/// Sparse product `a·x (+ b·y)`, parallel over output rows.
fn spmm(a: &SparseView, x: &LabelMatrix, extra: Option<(&SparseView, &LabelMatrix)>) -> LabelMatrix {
    let d = x.dim();
    let mut out = LabelMatrix::zeros(a.rows, d);
    if d == 0 {
        return out;
    }
    out.as_slice_mut()
        .par_chunks_mut(d)
        .enumerate()
        .for_each_init(
            || vec![0.0f64; d],
            |acc, (r, dst)| {
                acc.iter_mut().for_each(|v| *v = 0.0);
                a.accumulate_row(r, x, acc);
                if let Some((b, y)) = extra {
                    b.accumulate_row(r, y, acc);
                }
                for (o, &v) in dst.iter_mut().zip(acc.iter()) {
                    *o = v as f32;
                }
            },
        );
    out
}

/// The three axis-sums of one KG's adjacency tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleViews {
    /// |E| × |E|, head → tail.
    pub side: SparseView,
    /// |E| × |R|, head → relation.
    pub front: SparseView,
    /// |R| × |E|, relation → tail.
    pub top: SparseView,
}

impl TripleViews {
    /// Unnormalized views: each distinct triple contributes weight 1.
    pub fn raw(kg: &KnowledgeGraph) -> Self {
        let triples = kg.distinct_triples();
        let (ne, nr) = (kg.entity_count, kg.relation_count);
        let side = triples.iter().map(|t| (t.head, t.tail, 1.0)).collect();
        let front = triples.iter().map(|t| (t.head, t.rel, 1.0)).collect();
        let top = triples.iter().map(|t| (t.rel, t.tail, 1.0)).collect();
        Self {
            side: SparseView::from_entries(ne, ne, side),
            front: SparseView::from_entries(ne, nr, front),
            top: SparseView::from_entries(nr, ne, top),
        }
    }

    pub fn row_normalized(&self) -> Self {
        Self {
            side: self.side.row_normalized(),
            front: self.front.row_normalized(),
            top: self.top.row_normalized(),
        }
    }

    pub fn entity_count(&self) -> usize {
        self.side.rows
    }

    pub fn relation_count(&self) -> usize {
        self.top.rows
    }
}

/// Row-normalized three views of `kg`.
pub fn build_views(kg: &KnowledgeGraph) -> TripleViews {
    TripleViews::raw(kg).row_normalized()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PropagateOptions {
    pub rounds: usize,
    /// L2-normalize entity and relation rows after every round.
    pub per_round_l2: bool,
}

impl Default for PropagateOptions {
    fn default() -> Self {
        Self {
            rounds: 2,
            per_round_l2: true,
        }
    }
}

/// Per-round label matrices of one KG; index 0 is the input.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelState {
    pub per_round_entity: Vec<LabelMatrix>,
    pub per_round_relation: Vec<LabelMatrix>,
}

impl LabelState {
    pub fn rounds(&self) -> usize {
        self.per_round_entity.len() - 1
    }

    /// Row i is rounds 0..=k of entity i laid end to end.
    pub fn concatenated(&self) -> LabelMatrix {
        let parts: Vec<&LabelMatrix> = self.per_round_entity.iter().collect();
        LabelMatrix::hstack(&parts).expect("rounds share a row count")
    }
}

/// Runs the three-view recurrence on one graph.
pub fn propagate_graph(
    views: &TripleViews,
    entities: &LabelMatrix,
    relations: &LabelMatrix,
    opts: &PropagateOptions,
) -> Result<LabelState> {
    if entities.rows() != views.entity_count() {
        return Err(Error::DimensionMismatch(format!(
            "{} entity label rows for a graph with {} entities",
            entities.rows(),
            views.entity_count()
        )));
    }
    if relations.rows() != views.relation_count() || views.front.cols != views.relation_count() {
        return Err(Error::DimensionMismatch(format!(
            "{} relation label rows for a graph with {} relations",
            relations.rows(),
            views.relation_count()
        )));
    }
    if relations.dim() != entities.dim() {
        return Err(Error::DimensionMismatch(format!(
            "entity labels have dimension {}, relation labels {}",
            entities.dim(),
            relations.dim()
        )));
    }

    let mut per_round_entity = vec![entities.clone()];
    let mut per_round_relation = vec![relations.clone()];
    for _ in 0..opts.rounds {
        let e_prev = per_round_entity.last().unwrap();
        let r_prev = per_round_relation.last().unwrap();
        let mut e_next = spmm(&views.side, e_prev, Some((&views.front, r_prev)));
        let mut r_next = spmm(&views.top, e_prev, None);
        if opts.per_round_l2 {
            e_next.normalize_rows();
            r_next.normalize_rows();
        }
        per_round_entity.push(e_next);
        per_round_relation.push(r_next);
    }
    Ok(LabelState {
        per_round_entity,
        per_round_relation,
    })
}

/// Propagates both graphs of a pair independently.
pub fn propagate(
    views_src: &TripleViews,
    views_tgt: &TripleViews,
    labels: &crate::labels::InitialLabels,
    opts: &PropagateOptions,
) -> Result<(LabelState, LabelState)> {
    let (a, b) = rayon::join(
        || propagate_graph(views_src, &labels.source, &labels.source_relations, opts),
        || propagate_graph(views_tgt, &labels.target, &labels.target_relations, opts),
    );
    Ok((a?, b?))
}

/// One-hot propagation on a (small) graph: dimension x is the relevance of
/// each entity to `seeds[x]`.
pub fn propagate_onehot_subgraph(
    kg: &KnowledgeGraph,
    seeds: &[usize],
    opts: &PropagateOptions,
) -> Result<LabelState> {
    if seeds.is_empty() {
        return Err(Error::EmptySeeds);
    }
    let mut entities = LabelMatrix::zeros(kg.entity_count, seeds.len());
    for (x, &e) in seeds.iter().enumerate() {
        if e >= kg.entity_count {
            return Err(Error::EntityOutOfRange {
                index: e,
                count: kg.entity_count,
            });
        }
        entities.row_mut(e)[x] = 1.0;
    }
    let relations = LabelMatrix::zeros(kg.relation_count, seeds.len());
    propagate_graph(&build_views(kg), &entities, &relations, opts)
}
