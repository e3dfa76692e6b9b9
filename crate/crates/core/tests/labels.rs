mod common;

use std::fs;

use common::fixture;
use lightalign::kg::{load_dataset, IdMap, SplitSpec};
use lightalign::labels::{hypersphere_vector, init_literal, init_onehot, init_random_orthogonal, literal_matrix};
use lightalign::Error;

#[test]
fn literal_fixture_is_row_normalized() {
    let dir = fixture("toy4");
    let d = load_dataset(&dir, &SplitSpec::TrainFile(dir.join("sup_ent_ids"))).unwrap();
    let l = init_literal(&d, &dir.join("emb_src"), &dir.join("emb_tgt")).unwrap();
    let r3 = 1.0 / 3f32.sqrt();
    let expected = [[0.6, 0.0, 0.8], [0.0, 1.0, 0.0], [r3, r3, r3], [0.0, 0.0, -1.0]];
    for (i, e) in expected.iter().enumerate() {
        for m in [&l.source, &l.target] {
            for (a, b) in m.row(i).iter().zip(e) {
                assert!((a - b).abs() < 1e-6);
            }
        }
    }
    assert!(l.source_relations.as_slice().iter().all(|&v| v == 0.0));
}

#[test]
fn single_embedding_line() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("emb");
    fs::write(&p, "7\t0.0 0.0 3.0\n").unwrap();
    let m = literal_matrix(&p, &IdMap::from_ids(vec![7])).unwrap();
    assert_eq!(m.row(0), &[0.0, 0.0, 1.0]);
}

#[test]
fn embedding_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("emb");
    fs::write(&p, "7\t1.0 2.0\n").unwrap();
    assert!(matches!(literal_matrix(&p, &IdMap::from_ids(vec![7, 8])), Err(Error::MissingEmbedding { .. })));
    fs::write(&p, "7\t1.0 2.0\n8\t1.0\n").unwrap();
    assert!(literal_matrix(&p, &IdMap::from_ids(vec![7, 8])).is_err());
    fs::write(&p, "7\t1.0 NaN\n").unwrap();
    assert!(literal_matrix(&p, &IdMap::from_ids(vec![7])).is_err());
}

#[test]
fn onehot_and_random_share_seed_rows() {
    let dir = fixture("six_node");
    let d = load_dataset(&dir, &SplitSpec::Ratio { ratio: 0.5, seed: 9 }).unwrap();
    let onehot = init_onehot(&d.pair).unwrap();
    let random = init_random_orthogonal(&d.pair, 64, 5).unwrap();
    for (x, &(s, t)) in d.pair.seed_pairs.iter().enumerate() {
        assert_eq!(onehot.source.row(s), onehot.target.row(t));
        assert_eq!(random.source.row(s), random.target.row(t));
        assert_eq!(random.source.row(s), hypersphere_vector(5, x as u64, 64).as_slice());
        for (y, &(s2, _)) in d.pair.seed_pairs.iter().enumerate() {
            let dot: f32 = onehot.source.row(s).iter().zip(onehot.source.row(s2)).map(|(a, b)| a * b).sum();
            assert_eq!(dot, if x == y { 1.0 } else { 0.0 });
        }
    }
    for &(s, t) in &d.pair.test_pairs {
        assert!(random.source.is_zero_row(s) && random.target.is_zero_row(t));
    }
}

#[test]
fn distinct_seeds_nearly_orthogonal_at_4096() {
    for x in 0..20u64 {
        let a = hypersphere_vector(11, x, 4096);
        let b = hypersphere_vector(11, x + 20, 4096);
        let dot: f64 = a.iter().zip(&b).map(|(u, v)| (*u as f64) * (*v as f64)).sum();
        assert!(dot.abs() < 0.1);
    }
}
