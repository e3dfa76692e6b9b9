//! Unsupervised alignment from name vectors: noisy copies of shared random
//! vectors stand in for translated-name embeddings.

use std::fs;

use lightalign::kg::Dataset;
use lightalign::pipeline::{run, AlignConfig, Mode};
use lightalign::synth::{synthesize, SynthParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> lightalign::Result<()> {
    let pair = synthesize(&SynthParams { entities: 800, triples: 3200, noise: 0.1, ..Default::default() })?;
    let data = Dataset::from_pair(pair);
    let dir = std::env::temp_dir().join("lightalign-literal-example");
    fs::create_dir_all(&dir).expect("temp dir");

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let names: Vec<Vec<f64>> = (0..800).map(|_| (0..32).map(|_| normal.sample(&mut rng)).collect()).collect();
    let blur = |v: &[f64], rng: &mut ChaCha8Rng| -> String {
        v.iter().map(|x| format!("{:.4}", x + 1.2 * normal.sample(rng))).collect::<Vec<_>>().join(" ")
    };
    let mut src = String::new();
    let mut tgt = vec![String::new(); 800];
    for &(s, t) in &data.pair.test_pairs {
        src += &format!("{}\t{}\n", data.source_entities.id_of(s), blur(&names[s], &mut rng));
        tgt[t] = format!("{}\t{}\n", data.target_entities.id_of(t), blur(&names[s], &mut rng));
    }
    let (es, et) = (dir.join("emb_src"), dir.join("emb_tgt"));
    fs::write(&es, src).expect("write embeddings");
    fs::write(&et, tgt.concat()).expect("write embeddings");

    for (rounds, epochs) in [(0, 0), (2, 0), (2, 5)] {
        let cfg = AlignConfig { mode: Mode::Literal, rounds, iterative_epochs: epochs, ..Default::default() };
        let r = run(&data, &cfg, Some((&es, &et)))?;
        println!("rounds {rounds}, epochs {epochs}: hits@1 {:.3} hits@10 {:.3}", r.metrics.hits1, r.metrics.hits10);
    }
    Ok(())
}
