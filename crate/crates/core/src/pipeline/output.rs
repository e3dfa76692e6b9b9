use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde_json::json;

use super::AlignmentResult;
use crate::error::{Error, Result};
use crate::kg::Dataset;

/// `<src file-ID> TAB <tgt file-ID> TAB <score>` lines, score to 6 decimals.
pub fn pairs_tsv(result: &AlignmentResult, dataset: &Dataset) -> String {
    let mut out = String::new();
    for p in &result.pairs {
        let _ = writeln!(
            out,
            "{}\t{}\t{:.6}",
            dataset.source_entities.id_of(p.src),
            dataset.target_entities.id_of(p.tgt),
            p.score
        );
    }
    out
}

pub fn metrics_json(result: &AlignmentResult) -> serde_json::Value {
    json!({
        "hits1": result.metrics.hits1,
        "hits10": result.metrics.hits10,
        "mrr": result.metrics.mrr,
        "seconds_total": result.seconds_total(),
        "seconds_per_stage": result.timing,
        "config": result.provenance.config,
        "dataset_fingerprint": result.provenance.dataset_fingerprint,
    })
}

/// Writes `pairs.tsv` and `metrics.json` under `dir`.
pub fn write_outputs(result: &AlignmentResult, dataset: &Dataset, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let pairs = dir.join("pairs.tsv");
    fs::write(&pairs, pairs_tsv(result, dataset)).map_err(|e| Error::io(&pairs, e))?;
    let metrics = dir.join("metrics.json");
    let body = serde_json::to_string_pretty(&metrics_json(result)).expect("metrics serialize") + "\n";
    fs::write(&metrics, body).map_err(|e| Error::io(&metrics, e))?;
    Ok(())
}
