use ndarray::{linalg::general_mat_mul, Array2, ArrayView2};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::labels::LabelMatrix;

/// Anything that can list scored candidate columns per row.
pub trait Ranked {
    fn n_rows(&self) -> usize;
    fn n_cols(&self) -> usize;
    /// Stored `(column, score)` entries of row `i`, in no particular order.
    fn candidates(&self, i: usize) -> Vec<(usize, f64)>;
}

/// Orders candidates by descending score, ties by ascending column.
pub(crate) fn rank_order(a: &(usize, f64), b: &(usize, f64)) -> std::cmp::Ordering {
    b.1.total_cmp(&a.1).then(a.0.cmp(&b.0))
}

/// Row-sparse similarity matrix. Each row keeps its candidates sorted by
/// descending score (ties: ascending column). Absent entries are
/// structural zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSim {
    n_cols: usize,
    indptr: Vec<usize>,
    cols: Vec<usize>,
    scores: Vec<f64>,
}

impl SparseSim {
    /// Builds from per-row candidate lists; rows are sorted on the way in.
    pub fn from_rows(n_cols: usize, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        indptr.push(0);
        let nnz = rows.iter().map(Vec::len).sum();
        let mut cols = Vec::with_capacity(nnz);
        let mut scores = Vec::with_capacity(nnz);
        for (i, mut row) in rows.into_iter().enumerate() {
            row.sort_by(rank_order);
            let mut seen = std::collections::HashSet::with_capacity(row.len());
            for (c, s) in row {
                if c >= n_cols {
                    return Err(Error::DimensionMismatch(format!(
                        "column {c} outside {n_cols} columns"
                    )));
                }
                if !s.is_finite() {
                    return Err(Error::NonFinite("similarity scores"));
                }
                if !seen.insert(c) {
                    return Err(Error::DimensionMismatch(format!("row {i} repeats column {c}")));
                }
                cols.push(c);
                scores.push(s);
            }
            indptr.push(cols.len());
        }
        Ok(Self {
            n_cols,
            indptr,
            cols,
            scores,
        })
    }

    /// Keeps the `k` best entries of each row of a dense matrix.
    pub fn from_dense_topk(s: &Array2<f64>, k: usize) -> Result<Self> {
        let rows = (0..s.nrows())
            .map(|i| {
                let mut row: Vec<(usize, f64)> = s.row(i).iter().copied().enumerate().collect();
                select_top(&mut row, k);
                row
            })
            .collect();
        Self::from_rows(s.ncols(), rows)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.indptr.len() - 1, self.n_cols)
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// Row `i` as parallel slices (columns, scores), best first.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let span = self.indptr[i]..self.indptr[i + 1];
        (&self.cols[span.clone()], &self.scores[span])
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let (c, s) = self.row(i);
        c.iter().position(|&x| x == j).map(|p| s[p])
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let (n, m) = self.shape();
        let mut out = Array2::zeros((n, m));
        for i in 0..n {
            let (c, s) = self.row(i);
            for (&j, &v) in c.iter().zip(s) {
                out[[i, j]] = v;
            }
        }
        out
    }

    pub(crate) fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    pub(crate) fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub(crate) fn scores(&self) -> &[f64] {
        &self.scores
    }

    /// Same sparsity pattern, new values (row order preserved).
    pub(crate) fn with_values(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.scores.len());
        Self {
            n_cols: self.n_cols,
            indptr: self.indptr.clone(),
            cols: self.cols.clone(),
            scores: values,
        }
    }
}

impl Ranked for SparseSim {
    fn n_rows(&self) -> usize {
        self.shape().0
    }

    fn n_cols(&self) -> usize {
        self.n_cols
    }

    fn candidates(&self, i: usize) -> Vec<(usize, f64)> {
        let (c, s) = self.row(i);
        c.iter().copied().zip(s.iter().copied()).collect()
    }
}

impl Ranked for Array2<f64> {
    fn n_rows(&self) -> usize {
        self.nrows()
    }

    fn n_cols(&self) -> usize {
        self.ncols()
    }

    fn candidates(&self, i: usize) -> Vec<(usize, f64)> {
        self.row(i).iter().copied().enumerate().collect()
    }
}

/// Truncates `row` to its `k` best entries, sorted.
fn select_top(row: &mut Vec<(usize, f64)>, k: usize) {
    if row.len() > k {
        row.select_nth_unstable_by(k - 1, rank_order);
        row.truncate(k);
    }
    row.sort_by(rank_order);
}

const BLOCK_ROWS: usize = 256;

/// Exact top-k cosine retrieval.
///
/// Rows are L2-normalized copies of the inputs, scored in fixed 256-row
/// blocks so results do not depend on the thread count. Zero source rows
/// produce empty rows.
pub fn topk_retrieve(src: &LabelMatrix, tgt: &LabelMatrix, k: usize) -> Result<SparseSim> {
    if k == 0 {
        return Err(Error::InvalidConfig("top-k must be at least 1".into()));
    }
    if src.dim() != tgt.dim() {
        return Err(Error::DimensionMismatch(format!(
            "source labels have dimension {}, target {}",
            src.dim(),
            tgt.dim()
        )));
    }
    let mut src_n = src.clone();
    src_n.normalize_rows();
    let mut tgt_n = tgt.clone();
    tgt_n.normalize_rows();
    let tgt_t = tgt_n.view().reversed_axes();
    let n_src = src.rows();
    let n_tgt = tgt.rows();

    let blocks: Vec<Vec<Vec<(usize, f64)>>> = (0..n_src.div_ceil(BLOCK_ROWS))
        .into_par_iter()
        .map(|b| {
            let lo = b * BLOCK_ROWS;
            let hi = (lo + BLOCK_ROWS).min(n_src);
            let block: ArrayView2<'_, f32> = src_n.view().slice_move(ndarray::s![lo..hi, ..]);
            let mut scores = Array2::<f32>::zeros((hi - lo, n_tgt));
            general_mat_mul(1.0, &block, &tgt_t, 0.0, &mut scores);
            (lo..hi)
                .map(|i| {
                    if src.is_zero_row(i) {
                        return Vec::new();
                    }
                    let mut row: Vec<(usize, f64)> = scores
                        .row(i - lo)
                        .iter()
                        .map(|&v| v as f64)
                        .enumerate()
                        .collect();
                    select_top(&mut row, k);
                    row
                })
                .collect()
        })
        .collect();
    SparseSim::from_rows(n_tgt, blocks.into_iter().flatten().collect())
}

/// Full cosine matrix in f64 (small inputs only).
pub fn cosine_matrix(src: &LabelMatrix, tgt: &LabelMatrix) -> Result<Array2<f64>> {
    if src.dim() != tgt.dim() {
        return Err(Error::DimensionMismatch("cosine over different dimensions".into()));
    }
    let mut out = Array2::zeros((src.rows(), tgt.rows()));
    for i in 0..src.rows() {
        let a = src.row(i);
        let na = crate::labels::l2(a);
        for j in 0..tgt.rows() {
            let b = tgt.row(j);
            let nb = crate::labels::l2(b);
            if na > 0.0 && nb > 0.0 {
                let dot: f64 = a.iter().zip(b).map(|(&x, &y)| x as f64 * y as f64).sum();
                out[[i, j]] = dot / (na * nb);
            }
        }
    }
    Ok(out)
}
