//! Sinkhorn iteration on dense and top-k sparse similarity matrices.
//!
//! `P⁰ = exp(S/τ)`, then `q` rounds of row normalization followed by column
//! normalization, then one last row normalization so every supported row is
//! a probability vector. Normalizers are clamped at 1e-30.

use ndarray::{Array2, Axis};
use rayon::prelude::*;

use super::sim::{Ranked, SparseSim};
use crate::error::{Error, Result};

const FLOOR: f64 = 1e-30;

/// Output of Sinkhorn: soft assignment with the sparsity of its input.
#[derive(Debug, Clone, PartialEq)]
pub enum TransportPlan {
    Dense(Array2<f64>),
    Sparse(SparseSim),
}

impl TransportPlan {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            TransportPlan::Dense(p) => p.dim(),
            TransportPlan::Sparse(p) => p.shape(),
        }
    }

    pub fn to_dense(&self) -> Array2<f64> {
        match self {
            TransportPlan::Dense(p) => p.clone(),
            TransportPlan::Sparse(p) => p.to_dense(),
        }
    }

    /// Sum of each row's stored entries.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n_rows())
            .map(|i| self.candidates(i).iter().map(|c| c.1).sum())
            .collect()
    }
}

impl Ranked for TransportPlan {
    fn n_rows(&self) -> usize {
        self.shape().0
    }

    fn n_cols(&self) -> usize {
        self.shape().1
    }

    fn candidates(&self, i: usize) -> Vec<(usize, f64)> {
        match self {
            TransportPlan::Dense(p) => p.candidates(i),
            TransportPlan::Sparse(p) => p.candidates(i),
        }
    }
}

fn check(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidConfig(format!("tau must be positive, got {tau}")));
    }
    Ok(())
}

fn normalize_rows_dense(p: &mut Array2<f64>) {
    p.axis_iter_mut(Axis(0)).into_par_iter().for_each(|mut row| {
        let sum: f64 = row.sum();
        if sum > 0.0 {
            let d = sum.max(FLOOR);
            row.mapv_inplace(|v| v / d);
        }
    });
}

fn normalize_cols_dense(p: &mut Array2<f64>) {
    let mut col = vec![0.0f64; p.ncols()];
    for row in p.rows() {
        for (c, &v) in col.iter_mut().zip(row) {
            *c += v;
        }
    }
    p.axis_iter_mut(Axis(0)).into_par_iter().for_each(|mut row| {
        for (v, &c) in row.iter_mut().zip(&col) {
            if c > 0.0 {
                *v /= c.max(FLOOR);
            }
        }
    });
}

/// `q` rounds of 𝒩_c∘𝒩_r on an already exponentiated matrix, no final row pass.
fn iterate_dense(p: &mut Array2<f64>, q: usize) {
    for _ in 0..q {
        normalize_rows_dense(p);
        normalize_cols_dense(p);
    }
}

fn exp_shifted_dense(s: &Array2<f64>, tau: f64) -> Array2<f64> {
    let mut p = s.clone();
    p.axis_iter_mut(Axis(0)).into_par_iter().for_each(|mut row| {
        let m = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        row.mapv_inplace(|v| ((v - m) / tau).exp());
    });
    p
}

/// Dense Sinkhorn. With `q = 0` returns `exp(S/τ)` as is.
pub fn sinkhorn_dense(s: &Array2<f64>, tau: f64, q: usize) -> Result<TransportPlan> {
    check(tau)?;
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("similarity matrix"));
    }
    if q == 0 {
        return Ok(TransportPlan::Dense(s.mapv(|v| (v / tau).exp())));
    }
    // The per-row shift cancels in the first row normalization.
    let mut p = exp_shifted_dense(s, tau);
    iterate_dense(&mut p, q);
    normalize_rows_dense(&mut p);
    Ok(TransportPlan::Dense(p))
}

/// Sinkhorn restricted to the stored entries of `s`.
pub fn sinkhorn_sparse(s: &SparseSim, tau: f64, q: usize) -> Result<TransportPlan> {
    check(tau)?;
    if s.scores().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("similarity matrix"));
    }
    if q == 0 {
        let vals = s.scores().iter().map(|v| (v / tau).exp()).collect();
        return Ok(TransportPlan::Sparse(s.with_values(vals)));
    }
    let indptr = s.indptr();
    let cols = s.cols();
    let n_rows = indptr.len() - 1;
    let n_cols = s.shape().1;

    let mut vals = s.scores().to_vec();
    for_each_row(&mut vals, indptr, |row| {
        let m = row.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        row.iter_mut().for_each(|v| *v = ((*v - m) / tau).exp());
    });

    let row_pass = |vals: &mut Vec<f64>| {
        for_each_row(vals, indptr, |row| {
            let sum: f64 = row.iter().sum();
            if sum > 0.0 {
                let d = sum.max(FLOOR);
                row.iter_mut().for_each(|v| *v /= d);
            }
        })
    };

    let mut col_sum = vec![0.0f64; n_cols];
    for _ in 0..q {
        row_pass(&mut vals);
        col_sum.iter_mut().for_each(|c| *c = 0.0);
        for i in 0..n_rows {
            for k in indptr[i]..indptr[i + 1] {
                col_sum[cols[k]] += vals[k];
            }
        }
        for (v, &c) in vals.iter_mut().zip(cols) {
            let d = col_sum[c];
            if d > 0.0 {
                *v /= d.max(FLOOR);
            }
        }
    }
    row_pass(&mut vals);
    Ok(TransportPlan::Sparse(s.with_values(vals)))
}

fn for_each_row(vals: &mut [f64], indptr: &[usize], f: impl Fn(&mut [f64]) + Sync) {
    // Split the flat value array into per-row slices for parallel work.
    let mut rows: Vec<&mut [f64]> = Vec::with_capacity(indptr.len() - 1);
    let mut rest = vals;
    for w in indptr.windows(2) {
        let (head, tail) = rest.split_at_mut(w[1] - w[0]);
        rows.push(head);
        rest = tail;
    }
    rows.into_par_iter().for_each(&f);
}
