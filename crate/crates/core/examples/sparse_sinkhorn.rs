//! Top-k retrieval plus sparse Sinkhorn against the exact assignment on a
//! noisy planted permutation.

use lightalign::decode::{hungarian, row_argmax, sinkhorn_dense, sinkhorn_sparse, topk_retrieve};
use lightalign::labels::LabelMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> lightalign::Result<()> {
    let (n, d, k) = (300, 32, 20);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let normal = Normal::new(0.0f32, 1.0).unwrap();
    let src: Vec<Vec<f32>> = (0..n).map(|_| (0..d).map(|_| normal.sample(&mut rng)).collect()).collect();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut tgt = vec![vec![0.0; d]; n];
    for (i, &j) in perm.iter().enumerate() {
        tgt[j] = src[i].iter().map(|v| v + 1.4 * normal.sample(&mut rng)).collect();
    }
    let (src, tgt) = (LabelMatrix::from_rows(&src)?, LabelMatrix::from_rows(&tgt)?);

    let sim = topk_retrieve(&src, &tgt, k)?;
    let accuracy = |picks: Vec<Option<usize>>| {
        picks.iter().zip(&perm).filter(|(p, g)| **p == Some(**g)).count() as f64 / n as f64
    };
    let greedy = accuracy(row_argmax(&sim).into_iter().map(|x| x.map(|p| p.0)).collect());
    let sparse = accuracy(row_argmax(&sinkhorn_sparse(&sim, 0.05, 10)?).into_iter().map(|x| x.map(|p| p.0)).collect());
    let full = lightalign::decode::cosine_matrix(&src, &tgt)?;
    let dense = accuracy(row_argmax(&sinkhorn_dense(&full, 0.05, 10)?).into_iter().map(|x| x.map(|p| p.0)).collect());
    let exact = accuracy(hungarian(&full)?.row_to_col);

    println!("stored entries: {} of {}", sim.nnz(), n * n);
    println!("greedy nearest neighbour: {greedy:.3}");
    println!("sparse Sinkhorn (k = {k}): {sparse:.3}");
    println!("dense Sinkhorn:            {dense:.3}");
    println!("Hungarian:                 {exact:.3}");
    Ok(())
}
