//! Random-orthogonal labels for a few seed pairs, and how close to
//! orthogonal distinct classes are at several dimensions.

use lightalign::kg::{KgPair, KnowledgeGraph};
use lightalign::labels::{hypersphere_vector, init_onehot, init_random_orthogonal};

fn main() -> lightalign::Result<()> {
    let kg = KnowledgeGraph::new(5, 1, vec![])?;
    let pair = KgPair::new(kg.clone(), kg, vec![(0, 4), (1, 3), (2, 2)], vec![])?;

    let onehot = init_onehot(&pair)?;
    println!("one-hot source rows:");
    for i in 0..5 {
        println!("  {i}: {:?}", onehot.source.row(i));
    }

    let random = init_random_orthogonal(&pair, 1024, 42)?;
    println!("seed 0 shares a row across graphs: {}", random.source.row(0) == random.target.row(4));

    for d in [64, 256, 1024, 4096] {
        let worst = (0..200u64)
            .map(|i| {
                let a = hypersphere_vector(7, 2 * i, d);
                let b = hypersphere_vector(7, 2 * i + 1, d);
                a.iter().zip(&b).map(|(x, y)| (*x as f64) * (*y as f64)).sum::<f64>().abs()
            })
            .fold(0.0, f64::max);
        println!("d = {d:>4}: max |<x, y>| over 200 pairs = {worst:.4}");
    }
    Ok(())
}
