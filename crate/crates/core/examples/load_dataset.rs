//! Loads a dataset directory and aligns it, writing `pairs.tsv` and
//! `metrics.json`.
//!
//!     cargo run --release --example load_dataset -- <dataset-dir> [out-dir]

use std::path::PathBuf;

use lightalign::kg::{load_dataset, SplitSpec, SUP_ENT_IDS};
use lightalign::pipeline::{run, write_outputs, AlignConfig, CandidatePool};

fn main() -> lightalign::Result<()> {
    let mut args = std::env::args_os().skip(1);
    let dir = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/six_node"));
    let split = if dir.join(SUP_ENT_IDS).is_file() {
        SplitSpec::TrainFile(dir.join(SUP_ENT_IDS))
    } else {
        SplitSpec::Ratio { ratio: 0.3, seed: 0 }
    };
    let data = load_dataset(&dir, &split)?;
    println!(
        "{}: {} + {} entities, {} + {} triples, {} seed / {} test pairs, {:?} ids, fingerprint {:016x}",
        dir.display(),
        data.pair.source.entity_count,
        data.pair.target.entity_count,
        data.pair.source.triples.len(),
        data.pair.target.triples.len(),
        data.pair.seed_pairs.len(),
        data.pair.test_pairs.len(),
        data.convention,
        data.fingerprint
    );

    let cfg = AlignConfig { candidates: CandidatePool::Test, ..Default::default() };
    let result = run(&data, &cfg, None)?;
    println!("hits@1 {:.4} hits@10 {:.4} mrr {:.4}", result.metrics.hits1, result.metrics.hits10, result.metrics.mrr);
    for (stage, secs) in &result.timing {
        println!("  {stage:<13}{secs:.3}s");
    }
    if let Some(out) = args.next() {
        write_outputs(&result, &data, &PathBuf::from(out))?;
    }
    Ok(())
}
