use serde::{Deserialize, Serialize};

use crate::decode::{Ranked, SparseSim};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub hits1: f64,
    pub hits10: f64,
    pub mrr: f64,
}

impl Metrics {
    /// Aggregates 1-based ranks; `None` is a miss (rank ∞).
    pub fn from_ranks(ranks: &[Option<usize>]) -> Result<Self> {
        if ranks.is_empty() {
            return Err(Error::EmptyTestSet);
        }
        let n = ranks.len() as f64;
        let hits = |k: usize| ranks.iter().filter(|r| matches!(r, Some(r) if *r <= k)).count() as f64 / n;
        let mrr = ranks.iter().flatten().map(|&r| 1.0 / r as f64).sum::<f64>() / n;
        Ok(Self {
            hits1: hits(1),
            hits10: hits(10),
            mrr,
        })
    }
}

/// 1-based rank of `col` among row `row`'s stored candidates (descending
/// score, ties by ascending column); `None` when not stored.
pub fn rank_of(ranking: &impl Ranked, row: usize, col: usize) -> Option<usize> {
    let cands = ranking.candidates(row);
    let gold = cands.iter().find(|c| c.0 == col)?.1;
    let ahead = cands
        .iter()
        .filter(|&&(c, s)| s > gold || (s == gold && c < col))
        .count();
    Some(ahead + 1)
}

/// Hits@1, Hits@10 and MRR of `test_pairs` (row, column) against a ranking.
pub fn evaluate(ranking: &impl Ranked, test_pairs: &[(usize, usize)]) -> Result<Metrics> {
    let mut ranks = Vec::with_capacity(test_pairs.len());
    for &(s, t) in test_pairs {
        if s >= ranking.n_rows() {
            return Err(Error::EntityOutOfRange {
                index: s,
                count: ranking.n_rows(),
            });
        }
        ranks.push(rank_of(ranking, s, t));
    }
    Metrics::from_ranks(&ranks)
}

/// Scores a `src TAB tgt [TAB score]` prediction file against reference
/// pairs, all in file-ID space. Multiple lines per source form a ranked
/// candidate list; a missing score counts as 1.
pub fn evaluate_files(pairs: &std::path::Path, reference: &std::path::Path) -> Result<Metrics> {
    use std::collections::HashMap;

    let read = |p: &std::path::Path| std::fs::read_to_string(p).map_err(|e| Error::io(p, e));
    let mut src_index: HashMap<u64, usize> = HashMap::new();
    let mut rows: Vec<Vec<(u64, f64)>> = Vec::new();

    let text = read(pairs)?;
    for (i, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(Error::malformed(pairs, i + 1, "expected `src TAB tgt [TAB score]`"));
        }
        let id = |f: &str| {
            f.trim()
                .parse::<u64>()
                .map_err(|_| Error::malformed(pairs, i + 1, format!("not an integer id: {f:?}")))
        };
        let (s, t) = (id(fields[0])?, id(fields[1])?);
        let score = match fields.get(2) {
            Some(f) => f
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::malformed(pairs, i + 1, format!("not a number: {f:?}")))?,
            None => 1.0,
        };
        let n = src_index.len();
        let r = *src_index.entry(s).or_insert(n);
        if r == rows.len() {
            rows.push(Vec::new());
        }
        if rows[r].iter().all(|e: &(u64, f64)| e.0 != t) {
            rows[r].push((t, score));
        }
    }
    // Columns in ascending target ID so score ties rank by ID.
    let mut ids: Vec<u64> = rows.iter().flatten().map(|e| e.0).collect();
    ids.sort_unstable();
    ids.dedup();
    let tgt_index: HashMap<u64, usize> = ids.iter().enumerate().map(|(c, &id)| (id, c)).collect();
    let rows: Vec<Vec<(usize, f64)>> = rows
        .into_iter()
        .map(|row| row.into_iter().map(|(t, v)| (tgt_index[&t], v)).collect())
        .collect();

    let text = read(reference)?;
    let mut ranks = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(Error::malformed(reference, i + 1, "expected `src TAB tgt`"));
        }
        let id = |f: &str| {
            f.trim()
                .parse::<u64>()
                .map_err(|_| Error::malformed(reference, i + 1, format!("not an integer id: {f:?}")))
        };
        let (s, t) = (id(fields[0])?, id(fields[1])?);
        ranks.push((s, t));
    }
    let n_cols = tgt_index.len();
    let sim = SparseSim::from_rows(n_cols, rows)?;
    let ranks: Vec<Option<usize>> = ranks
        .into_iter()
        .map(|(s, t)| match (src_index.get(&s), tgt_index.get(&t)) {
            (Some(&r), Some(&c)) => rank_of(&sim, r, c),
            _ => None,
        })
        .collect();
    Metrics::from_ranks(&ranks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn all_first() {
        let s = array![[0.9, 0.1], [0.2, 0.8]];
        let m = evaluate(&s, &[(0, 0), (1, 1)]).unwrap();
        assert_eq!((m.hits1, m.hits10, m.mrr), (1.0, 1.0, 1.0));
    }

    #[test]
    fn always_second() {
        let s = array![[0.9, 0.1], [0.2, 0.8]];
        let m = evaluate(&s, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!((m.hits1, m.hits10, m.mrr), (0.0, 1.0, 0.5));
    }

    #[test]
    fn absent_gold_is_a_miss() {
        let s = SparseSim::from_rows(3, vec![vec![(0, 0.5)], vec![]]).unwrap();
        let m = evaluate(&s, &[(0, 2), (1, 1)]).unwrap();
        assert_eq!((m.hits1, m.hits10, m.mrr), (0.0, 0.0, 0.0));
    }

    #[test]
    fn ties_rank_by_column() {
        let s = array![[0.5, 0.5, 0.5]];
        assert_eq!(rank_of(&s, 0, 0), Some(1));
        assert_eq!(rank_of(&s, 0, 2), Some(3));
    }

    #[test]
    fn empty_test_set() {
        let s = array![[1.0]];
        assert!(matches!(evaluate(&s, &[]), Err(Error::EmptyTestSet)));
    }
}
