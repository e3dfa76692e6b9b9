use super::sim::Ranked;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtractMode {
    /// Best column of every row.
    RowArgmax,
    /// Only pairs that are each other's best match.
    MutualArgmax,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignedPair {
    pub src: usize,
    pub tgt: usize,
    pub score: f64,
}

fn better(a: (usize, f64), b: (usize, f64)) -> bool {
    a.1 > b.1 || (a.1 == b.1 && a.0 < b.0)
}

/// Best stored column per row (ties: lowest column); `None` for empty rows.
pub fn row_argmax(plan: &impl Ranked) -> Vec<Option<(usize, f64)>> {
    (0..plan.n_rows())
        .map(|i| {
            plan.candidates(i)
                .into_iter()
                .fold(None, |best, c| match best {
                    Some(b) if !better(c, b) => Some(b),
                    _ => Some(c),
                })
        })
        .collect()
}

/// Best stored row per column (ties: lowest row).
pub fn col_argmax(plan: &impl Ranked) -> Vec<Option<(usize, f64)>> {
    let mut best: Vec<Option<(usize, f64)>> = vec![None; plan.n_cols()];
    for i in 0..plan.n_rows() {
        for (j, v) in plan.candidates(i) {
            match best[j] {
                Some(b) if !better((i, v), b) => {}
                _ => best[j] = Some((i, v)),
            }
        }
    }
    best
}

/// Reads an alignment off a plan or similarity matrix, in row order.
pub fn extract_alignment(plan: &impl Ranked, mode: ExtractMode) -> Vec<AlignedPair> {
    let rows = row_argmax(plan);
    let cols = match mode {
        ExtractMode::MutualArgmax => Some(col_argmax(plan)),
        ExtractMode::RowArgmax => None,
    };
    rows.into_iter()
        .enumerate()
        .filter_map(|(src, best)| {
            let (tgt, score) = best?;
            if let Some(cols) = &cols {
                if cols[tgt].map(|c| c.0) != Some(src) {
                    return None;
                }
            }
            Some(AlignedPair { src, tgt, score })
        })
        .collect()
}
