//! Initial label matrices: exact one-hot classes, random unit vectors on the
//! d-dimensional hypersphere, or normalized name embeddings.

use std::fs;
use std::path::Path;

use ndarray::{s, Array2, ArrayView1, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kg::{Dataset, IdMap, KgPair};

/// Dense row-major label matrix, one row per entity (or relation).
#[derive(Debug, Clone, PartialEq)]
pub struct LabelMatrix {
    values: Array2<f32>,
}

impl LabelMatrix {
    pub fn zeros(rows: usize, dim: usize) -> Self {
        Self {
            values: Array2::zeros((rows, dim)),
        }
    }

    pub fn from_array(values: Array2<f32>) -> Self {
        Self {
            values: values.as_standard_layout().into_owned(),
        }
    }

    pub fn from_rows(rows: &[Vec<f32>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch("ragged label rows".into()));
        }
        let flat: Vec<f32> = rows.iter().flatten().copied().collect();
        Ok(Self {
            values: Array2::from_shape_vec((rows.len(), dim), flat).unwrap(),
        })
    }

    pub fn rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn dim(&self) -> usize {
        self.values.ncols()
    }

    pub fn row(&self, i: usize) -> &[f32] {
        let d = self.dim();
        &self.as_slice()[i * d..(i + 1) * d]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f32] {
        let d = self.dim();
        &mut self.as_slice_mut()[i * d..(i + 1) * d]
    }

    pub fn as_slice(&self) -> &[f32] {
        self.values.as_slice().expect("label matrix is contiguous")
    }

    pub fn as_slice_mut(&mut self) -> &mut [f32] {
        self.values.as_slice_mut().expect("label matrix is contiguous")
    }

    pub fn view(&self) -> ndarray::ArrayView2<'_, f32> {
        self.values.view()
    }

    pub fn into_array(self) -> Array2<f32> {
        self.values
    }

    pub fn row_norm(&self, i: usize) -> f64 {
        l2(self.row(i))
    }

    /// Horizontal concatenation; all parts must have the same row count.
    pub fn hstack(parts: &[&LabelMatrix]) -> Result<Self> {
        let rows = parts.first().map_or(0, |p| p.rows());
        if parts.iter().any(|p| p.rows() != rows) {
            return Err(Error::DimensionMismatch("hstack over different row counts".into()));
        }
        let dim: usize = parts.iter().map(|p| p.dim()).sum();
        let mut out = Array2::zeros((rows, dim));
        let mut col = 0;
        for p in parts {
            out.slice_mut(s![.., col..col + p.dim()]).assign(&p.values);
            col += p.dim();
        }
        Ok(Self { values: out })
    }

    /// Rescales every nonzero row to unit L2 norm.
    pub fn normalize_rows(&mut self) {
        let d = self.dim();
        if d == 0 {
            return;
        }
        self.as_slice_mut()
            .par_chunks_mut(d)
            .for_each(normalize_in_place);
    }

    pub fn is_zero_row(&self, i: usize) -> bool {
        self.row(i).iter().all(|&v| v == 0.0)
    }

    pub fn column(&self, j: usize) -> ArrayView1<'_, f32> {
        self.values.index_axis(Axis(1), j)
    }
}

pub(crate) fn l2(row: &[f32]) -> f64 {
    row.iter().map(|&v| (v as f64) * (v as f64)).sum::<f64>().sqrt()
}

pub(crate) fn normalize_in_place(row: &mut [f32]) {
    let norm = l2(row);
    if norm > 0.0 {
        for v in row.iter_mut() {
            *v = (*v as f64 / norm) as f32;
        }
    }
}

/// Entity and relation label matrices for both graphs of a pair.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialLabels {
    pub source: LabelMatrix,
    pub target: LabelMatrix,
    pub source_relations: LabelMatrix,
    pub target_relations: LabelMatrix,
}

impl InitialLabels {
    fn zero_relations(pair: &KgPair, source: LabelMatrix, target: LabelMatrix) -> Self {
        let d = source.dim();
        Self {
            source_relations: LabelMatrix::zeros(pair.source.relation_count, d),
            target_relations: LabelMatrix::zeros(pair.target.relation_count, d),
            source,
            target,
        }
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }
}

/// One class per seed pair: the x-th pair gets the x-th standard basis vector
/// on both sides.
pub fn init_onehot(pair: &KgPair) -> Result<InitialLabels> {
    if pair.seed_pairs.is_empty() {
        return Err(Error::EmptySeeds);
    }
    let d = pair.seed_pairs.len();
    let mut src = LabelMatrix::zeros(pair.source.entity_count, d);
    let mut tgt = LabelMatrix::zeros(pair.target.entity_count, d);
    for (x, &(s, t)) in pair.seed_pairs.iter().enumerate() {
        src.row_mut(s)[x] = 1.0;
        tgt.row_mut(t)[x] = 1.0;
    }
    Ok(InitialLabels::zero_relations(pair, src, tgt))
}

/// Uniform draw on the unit sphere in `d` dimensions for class `index`.
///
/// Each class uses its own ChaCha stream, so the vector for a given index
/// does not depend on how many other classes exist.
pub fn hypersphere_vector(seed: u64, index: u64, d: usize) -> Vec<f32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let raw: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
    let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    raw.into_iter().map(|v| (v / norm) as f32).collect()
}

/// Writes the class vector for `pairs[x]` into both sides' rows, using
/// class index `first_class + x`.
pub(crate) fn assign_random_labels(
    src: &mut LabelMatrix,
    tgt: &mut LabelMatrix,
    pairs: &[(usize, usize)],
    first_class: usize,
    seed: u64,
) {
    let d = src.dim();
    let vectors: Vec<Vec<f32>> = (0..pairs.len())
        .into_par_iter()
        .map(|x| hypersphere_vector(seed, (first_class + x) as u64, d))
        .collect();
    for (&(s, t), v) in pairs.iter().zip(vectors) {
        src.row_mut(s).copy_from_slice(&v);
        tgt.row_mut(t).copy_from_slice(&v);
    }
}

/// Random-orthogonal labels: every seed pair shares one independent unit
/// vector; all other rows are zero.
pub fn init_random_orthogonal(pair: &KgPair, d: usize, seed: u64) -> Result<InitialLabels> {
    if d == 0 {
        return Err(Error::InvalidConfig("label dimension must be at least 1".into()));
    }
    let mut src = LabelMatrix::zeros(pair.source.entity_count, d);
    let mut tgt = LabelMatrix::zeros(pair.target.entity_count, d);
    assign_random_labels(&mut src, &mut tgt, &pair.seed_pairs, 0, seed);
    Ok(InitialLabels::zero_relations(pair, src, tgt))
}

/// Parses `<id> TAB <float> [TAB|space <float>]...` lines.
pub fn read_embeddings(path: &Path) -> Result<Vec<(u64, Vec<f64>)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    let mut dim = None;
    for (i, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.is_empty() {
            continue;
        }
        let (id, rest) = line
            .split_once('\t')
            .ok_or_else(|| Error::malformed(path, i + 1, "expected `<id> TAB <floats>`"))?;
        let id: u64 = id
            .trim()
            .parse()
            .map_err(|_| Error::malformed(path, i + 1, format!("not an integer id: {id:?}")))?;
        let values = rest
            .split(['\t', ' '])
            .filter(|f| !f.is_empty())
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::malformed(path, i + 1, format!("not a number: {f:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::malformed(path, i + 1, "non-finite embedding value"));
        }
        match dim {
            None => dim = Some(values.len()),
            Some(d) if d != values.len() => {
                return Err(Error::malformed(
                    path,
                    i + 1,
                    format!("embedding has {} values, expected {d}", values.len()),
                ))
            }
            _ => {}
        }
        out.push((id, values));
    }
    Ok(out)
}

/// Builds an L2-normalized entity matrix from an embedding file.
pub fn literal_matrix(path: &Path, ids: &IdMap) -> Result<LabelMatrix> {
    let rows = read_embeddings(path)?;
    let d = rows.first().map_or(0, |(_, v)| v.len());
    let mut out = LabelMatrix::zeros(ids.len(), d);
    let mut covered = vec![false; ids.len()];
    for (id, v) in rows {
        // Vectors for entities outside this graph are ignored.
        if let Some(i) = ids.index_of(id) {
            let row = out.row_mut(i);
            for (dst, src) in row.iter_mut().zip(&v) {
                *dst = *src as f32;
            }
            normalize_in_place(row);
            covered[i] = true;
        }
    }
    if let Some(missing) = covered.iter().position(|c| !c) {
        return Err(Error::MissingEmbedding {
            path: path.to_path_buf(),
            id: ids.id_of(missing),
        });
    }
    Ok(out)
}

/// Literal labels from name embeddings of both graphs; relation labels zero.
pub fn init_literal(dataset: &Dataset, embeddings_src: &Path, embeddings_tgt: &Path) -> Result<InitialLabels> {
    let src = literal_matrix(embeddings_src, &dataset.source_entities)?;
    let tgt = literal_matrix(embeddings_tgt, &dataset.target_entities)?;
    if src.dim() != tgt.dim() {
        return Err(Error::DimensionMismatch(format!(
            "source embeddings have dimension {}, target {}",
            src.dim(),
            tgt.dim()
        )));
    }
    Ok(InitialLabels::zero_relations(&dataset.pair, src, tgt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::KnowledgeGraph;

    fn pair(n: usize, seeds: Vec<(usize, usize)>) -> KgPair {
        let kg = KnowledgeGraph::new(n, 1, vec![]).unwrap();
        KgPair::new(kg.clone(), kg, seeds, vec![]).unwrap()
    }

    #[test]
    fn onehot_two_seeds() {
        let p = pair(3, vec![(0, 2), (1, 0)]);
        let l = init_onehot(&p).unwrap();
        assert_eq!((l.source.rows(), l.source.dim()), (3, 2));
        assert_eq!(l.source.row(0), &[1.0, 0.0]);
        assert_eq!(l.target.row(2), &[1.0, 0.0]);
        assert_eq!(l.target.row(0), &[0.0, 1.0]);
        assert!(l.source.is_zero_row(2));
        assert!(l.target.is_zero_row(1));
        assert!(l.source_relations.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn onehot_column_sums_are_one() {
        let p = pair(8, (0..5).map(|i| (i, 7 - i)).collect());
        let l = init_onehot(&p).unwrap();
        for m in [&l.source, &l.target] {
            for j in 0..5 {
                assert_eq!(m.column(j).sum(), 1.0);
            }
        }
    }

    #[test]
    fn onehot_requires_seeds() {
        assert!(matches!(init_onehot(&pair(2, vec![])), Err(Error::EmptySeeds)));
    }

    #[test]
    fn random_rows_are_unit_and_shared() {
        let p = pair(6, vec![(0, 1), (3, 4), (5, 0)]);
        let l = init_random_orthogonal(&p, 64, 11).unwrap();
        for &(s, t) in &p.seed_pairs {
            assert_eq!(l.source.row(s), l.target.row(t));
            assert!((l.source.row_norm(s) - 1.0).abs() < 1e-6);
        }
        assert!(l.source.is_zero_row(1));
        assert!(l.target.is_zero_row(2));
    }

    #[test]
    fn random_is_deterministic_and_prefix_stable() {
        let p = pair(6, vec![(0, 1), (3, 4)]);
        let a = init_random_orthogonal(&p, 32, 5).unwrap();
        let b = init_random_orthogonal(&p, 32, 5).unwrap();
        assert_eq!(a, b);
        let bigger = pair(6, vec![(0, 1), (3, 4), (5, 5)]);
        let c = init_random_orthogonal(&bigger, 32, 5).unwrap();
        assert_eq!(a.source.row(0), c.source.row(0));
        assert_eq!(a.source.row(3), c.source.row(3));
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(init_random_orthogonal(&pair(2, vec![(0, 0)]), 0, 1).is_err());
    }

    #[test]
    fn orthogonality_bound_crosses_at_2048() {
        let bound = |d: f64| (1.0f64 - 0.01).powf((d + 1.0) / 2.0);
        assert!(bound(2049.0) < 3.37e-5, "{}", bound(2049.0));
        assert!((bound(2049.0) - 3.37e-5).abs() < 0.02e-5);
        assert!(bound(2048.0) > 3.37e-5);
    }
}
