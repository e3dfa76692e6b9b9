//! Scores a ranked prediction file against gold pairs.

use std::path::PathBuf;

use lightalign::pipeline::evaluate_files;

fn main() -> lightalign::Result<()> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/eval");
    let m = evaluate_files(&fixtures.join("pairs.tsv"), &fixtures.join("reference"))?;
    println!("hits@1 {:.3} hits@10 {:.3} mrr {:.4}", m.hits1, m.hits10, m.mrr);
    Ok(())
}
