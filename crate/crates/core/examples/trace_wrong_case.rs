//! Explains a wrong alignment: the source shares more anchors with the
//! wrong target than with the gold one.

use lightalign::kg::{KgPair, KnowledgeGraph, Triple};
use lightalign::trace::{trace_alignment, TraceOptions};

fn names(prefix: &[&str]) -> Vec<String> {
    prefix.iter().map(|s| s.to_string()).chain((0..7).map(|i| format!("anchor{i}"))).collect()
}

fn main() -> lightalign::Result<()> {
    // Source entity 0 and target entity 0 both point at anchors 0..5; the
    // gold target 1 points at anchors 0, 1, 2, 5, 6 through another relation.
    let mut src: Vec<Triple> = (0..5).map(|i| Triple::new(0, 0, i + 1)).collect();
    src.extend([4, 5, 6].iter().map(|&i| Triple::new(8, 1, i + 1)));
    let mut tgt: Vec<Triple> = (0..5).map(|i| Triple::new(0, 0, i + 2)).collect();
    tgt.extend([0, 1, 2, 5, 6].iter().map(|&i| Triple::new(1, 1, i + 2)));
    let mut src_names = names(&["Source"]);
    src_names.push("Hub".into());
    let source = KnowledgeGraph::new(9, 2, src)?.with_entity_names(src_names)?;
    let target = KnowledgeGraph::new(9, 2, tgt)?.with_entity_names(names(&["Wrong", "Gold"]))?;
    let pair = KgPair::new(source, target, (0..7).map(|i| (i + 1, i + 2)).collect(), vec![(0, 1)])?;

    let opts = TraceOptions { hops: 3, ..TraceOptions::new(2) };
    let report = trace_alignment(&pair, 0, 0, 1, &opts)?;
    print!("{}", report.to_text());
    Ok(())
}
