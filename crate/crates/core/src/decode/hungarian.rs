//! Exact maximum-weight assignment (Hungarian algorithm with potentials,
//! O(n²m)). Used as a reference decoder on small instances.

use ndarray::Array2;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// Column assigned to each row; `None` only for surplus rows of a tall matrix.
    pub row_to_col: Vec<Option<usize>>,
    /// Sum of the selected scores.
    pub objective: f64,
}

impl Assignment {
    /// The assignment as a plain permutation; `None` if any row is unassigned.
    pub fn permutation(&self) -> Option<Vec<usize>> {
        self.row_to_col.iter().copied().collect()
    }
}

/// Maximizes `Σ S[i, σ(i)]` over one-to-one assignments. Rectangular inputs
/// behave as if padded with prohibitively low scores: every row of a wide
/// matrix and every column of a tall one gets matched.
pub fn hungarian(s: &Array2<f64>) -> Result<Assignment> {
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("assignment scores"));
    }
    let (n, m) = s.dim();
    if n <= m {
        let row_to_col = solve_wide(n, m, |i, j| -s[[i, j]]);
        let objective = row_to_col.iter().enumerate().map(|(i, &j)| s[[i, j]]).sum();
        Ok(Assignment {
            row_to_col: row_to_col.into_iter().map(Some).collect(),
            objective,
        })
    } else {
        let col_to_row = solve_wide(m, n, |j, i| -s[[i, j]]);
        let mut row_to_col = vec![None; n];
        let mut objective = 0.0;
        for (j, &i) in col_to_row.iter().enumerate() {
            row_to_col[i] = Some(j);
            objective += s[[i, j]];
        }
        Ok(Assignment {
            row_to_col,
            objective,
        })
    }
}

/// Minimum-cost assignment of `n` rows into `m ≥ n` columns.
fn solve_wide(n: usize, m: usize, cost: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    // 1-based potentials; column 0 is a virtual column for the row being inserted.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0usize; n];
    for j in 1..=m {
        if owner[j] != 0 {
            row_to_col[owner[j] - 1] = j - 1;
        }
    }
    row_to_col
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn identity_dominant() {
        let s = array![[5.0, 1.0, 0.0], [0.5, 4.0, 1.0], [0.0, 1.0, 3.0]];
        assert_eq!(hungarian(&s).unwrap().permutation(), Some(vec![0, 1, 2]));
    }

    #[test]
    fn forced_swap() {
        let a = hungarian(&array![[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(a.permutation(), Some(vec![1, 0]));
        assert_eq!(a.objective, 2.0);
    }

    #[test]
    fn rectangular_both_ways() {
        let wide = array![[1.0, 9.0, 2.0], [8.0, 7.0, 0.0]];
        let a = hungarian(&wide).unwrap();
        assert_eq!(a.permutation(), Some(vec![1, 0]));
        assert_eq!(a.objective, 17.0);
        let tall = wide.t().to_owned();
        let b = hungarian(&tall).unwrap();
        assert_eq!(b.row_to_col, vec![Some(1), Some(0), None]);
        assert_eq!(b.objective, 17.0);
    }

    #[test]
    fn non_finite_rejected() {
        assert!(hungarian(&array![[f64::INFINITY]]).is_err());
    }

    #[test]
    fn empty() {
        let a = hungarian(&Array2::zeros((0, 0))).unwrap();
        assert!(a.row_to_col.is_empty());
    }
}
