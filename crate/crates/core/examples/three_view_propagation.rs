//! Three-view propagation on a small graph, printing each round's labels.

use lightalign::kg::{add_reverse_triples, KnowledgeGraph, Triple};
use lightalign::propagate::{build_views, propagate_onehot_subgraph, PropagateOptions};

fn main() -> lightalign::Result<()> {
    let triples = [(0, 0, 1), (0, 1, 2), (1, 0, 3), (2, 0, 3), (2, 1, 5), (1, 1, 4), (4, 0, 5)]
        .iter()
        .map(|&(h, r, t)| Triple::new(h, r, t))
        .collect();
    let kg = add_reverse_triples(&KnowledgeGraph::new(6, 2, triples)?);
    let views = build_views(&kg);
    println!(
        "views: side {} entries, front {} entries, top {} entries",
        views.side.nnz(),
        views.front.nnz(),
        views.top.nnz()
    );

    // Entities 3 and 5 are the anchors; dimension x is relevance to anchor x.
    let state = propagate_onehot_subgraph(&kg, &[3, 5], &PropagateOptions::default())?;
    for (t, m) in state.per_round_entity.iter().enumerate() {
        println!("round {t}");
        for i in 0..m.rows() {
            println!("  entity {i}: {:?}", m.row(i));
        }
    }
    println!("concatenated width: {}", state.concatenated().dim());
    Ok(())
}
